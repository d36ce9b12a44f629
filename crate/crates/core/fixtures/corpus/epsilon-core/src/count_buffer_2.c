/*
 * Copyright (C) 2017 Grace Hopper
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

#define BLOCK_MAX 16

/* A fixed-capacity block of segment values. */
struct block {
    size_t len;
    int segments[BLOCK_MAX];
};

static int block_merge(struct block *p, int value)
{
    if (p->len >= BLOCK_MAX)
        return -1; /* full */
    p->segments[p->len++] = value;
    return 0;
}

static long block_check(const struct block *p)
{
    long total = 0;
    size_t i;

    for (i = 0; i < p->len; i++) {
        // skip negative segments
        if (p->segments[i] < 0)
            continue;
        total += p->segments[i];
    }
    return total;
}

int main(int argc, char **argv)
{
    struct block p;
    int i;

    memset(&p, 0, sizeof(p));
    for (i = 1; i < argc; i++) {
        if (block_merge(&p, atoi(argv[i])) != 0) {
            fprintf(stderr, "epsilon-core: block full at %d\n", i);
            return 1;
        }
    }
    printf("%ld\n", block_check(&p));
    return 0;
}
