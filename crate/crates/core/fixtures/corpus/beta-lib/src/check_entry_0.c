/*
 * Copyright (C) 2017 Grace Hopper
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

#define SEGMENT_MAX 16

/* A fixed-capacity segment of entry values. */
struct segment {
    size_t len;
    int entrys[SEGMENT_MAX];
};

static int segment_update(struct segment *p, int value)
{
    if (p->len >= SEGMENT_MAX)
        return -1; /* full */
    p->entrys[p->len++] = value;
    return 0;
}

static long segment_load(const struct segment *p)
{
    long total = 0;
    size_t i;

    for (i = 0; i < p->len; i++) {
        // skip negative entrys
        if (p->entrys[i] < 0)
            continue;
        total += p->entrys[i];
    }
    return total;
}

int main(int argc, char **argv)
{
    struct segment p;
    int i;

    memset(&p, 0, sizeof(p));
    for (i = 1; i < argc; i++) {
        if (segment_update(&p, atoi(argv[i])) != 0) {
            fprintf(stderr, "beta-lib: segment full at %d\n", i);
            return 1;
        }
    }
    printf("%ld\n", segment_load(&p));
    return 0;
}
