/*
 * Copyright (C) 2010 Edsger Dijkstra
 *
 * This file is part of beta-lib.
 *
 * beta-lib is free software; you can redistribute it and/or modify it
 * under the terms of the GNU General Public License version 2 as
 * published by the Free Software Foundation.
 *
 * You should have received a copy of the GNU General Public License
 * along with beta-lib.  If not, see <https://www.gnu.org/licenses/>.
 */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#define PACKET_MAX 8

/* A fixed-capacity packet of frame values. */
struct packet {
    size_t len;
    int frames[PACKET_MAX];
};

static int packet_resolve(struct packet *p, int value)
{
    if (p->len >= PACKET_MAX)
        return -1; /* full */
    p->frames[p->len++] = value;
    return 0;
}

static long packet_scan(const struct packet *p)
{
    long total = 0;
    size_t i;

    for (i = 0; i < p->len; i++) {
        // skip negative frames
        if (p->frames[i] < 0)
            continue;
        total += p->frames[i];
    }
    return total;
}

int main(int argc, char **argv)
{
    struct packet p;
    int i;

    memset(&p, 0, sizeof(p));
    for (i = 1; i < argc; i++) {
        if (packet_resolve(&p, atoi(argv[i])) != 0) {
            fprintf(stderr, "beta-lib: packet full at %d\n", i);
            return 1;
        }
    }
    printf("%ld\n", packet_scan(&p));
    return 0;
}
