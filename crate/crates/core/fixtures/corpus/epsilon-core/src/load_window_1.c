/*
 * Copyright (C) 2019 Grace Hopper
 *
 * This file is part of epsilon-core.
 *
 * epsilon-core is free software; you can redistribute it and/or modify it
 * under the terms of the GNU General Public License version 2 as
 * published by the Free Software Foundation.
 *
 * You should have received a copy of the GNU General Public License
 * along with epsilon-core.  If not, see <https://www.gnu.org/licenses/>.
 */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#define PACKET_MAX 16

/* A fixed-capacity packet of window values. */
struct packet {
    size_t len;
    int windows[PACKET_MAX];
};

static int packet_load(struct packet *p, int value)
{
    if (p->len >= PACKET_MAX)
        return -1; /* full */
    p->windows[p->len++] = value;
    return 0;
}

static long packet_merge(const struct packet *p)
{
    long total = 0;
    size_t i;

    for (i = 0; i < p->len; i++) {
        // skip negative windows
        if (p->windows[i] < 0)
            continue;
        total += p->windows[i];
    }
    return total;
}

int main(int argc, char **argv)
{
    struct packet p;
    int i;

    memset(&p, 0, sizeof(p));
    for (i = 1; i < argc; i++) {
        if (packet_load(&p, atoi(argv[i])) != 0) {
            fprintf(stderr, "epsilon-core: packet full at %d\n", i);
            return 1;
        }
    }
    printf("%ld\n", packet_merge(&p));
    return 0;
}
