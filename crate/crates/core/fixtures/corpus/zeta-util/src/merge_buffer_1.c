/*
 * Copyright (C) 2016 Ken Thompson
 *
 * This file is part of zeta-util.
 *
 * zeta-util is free software; you can redistribute it and/or modify it
 * under the terms of the GNU General Public License version 2 as
 * published by the Free Software Foundation.
 *
 * You should have received a copy of the GNU General Public License
 * along with zeta-util.  If not, see <https://www.gnu.org/licenses/>.
 */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#define SEGMENT_MAX 32

/* A fixed-capacity segment of frame values. */
struct segment {
    size_t len;
    int frames[SEGMENT_MAX];
};

static int segment_resolve(struct segment *p, int value)
{
    if (p->len >= SEGMENT_MAX)
        return -1; /* full */
    p->frames[p->len++] = value;
    return 0;
}

static long segment_split(const struct segment *p)
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
    struct segment p;
    int i;

    memset(&p, 0, sizeof(p));
    for (i = 1; i < argc; i++) {
        if (segment_resolve(&p, atoi(argv[i])) != 0) {
            fprintf(stderr, "zeta-util: segment full at %d\n", i);
            return 1;
        }
    }
    printf("%ld\n", segment_split(&p));
    return 0;
}
