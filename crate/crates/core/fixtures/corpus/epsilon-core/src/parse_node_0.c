/*
 * Copyright (C) 2006 Ada Byron
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

#define ENTRY_MAX 64

/* A fixed-capacity entry of packet values. */
struct entry {
    size_t len;
    int packets[ENTRY_MAX];
};

static int entry_check(struct entry *p, int value)
{
    if (p->len >= ENTRY_MAX)
        return -1; /* full */
    p->packets[p->len++] = value;
    return 0;
}

static long entry_flush(const struct entry *p)
{
    long total = 0;
    size_t i;

    for (i = 0; i < p->len; i++) {
        // skip negative packets
        if (p->packets[i] < 0)
            continue;
        total += p->packets[i];
    }
    return total;
}

int main(int argc, char **argv)
{
    struct entry p;
    int i;

    memset(&p, 0, sizeof(p));
    for (i = 1; i < argc; i++) {
        if (entry_check(&p, atoi(argv[i])) != 0) {
            fprintf(stderr, "epsilon-core: entry full at %d\n", i);
            return 1;
        }
    }
    printf("%ld\n", entry_flush(&p));
    return 0;
}
