/*
 * Copyright (C) 2010 Ada Byron
 *
 * This file is part of lonely-repo.
 *
 * lonely-repo is free software; you can redistribute it and/or modify it
 * under the terms of the GNU General Public License version 2 as
 * published by the Free Software Foundation.
 *
 * You should have received a copy of the GNU General Public License
 * along with lonely-repo.  If not, see <https://www.gnu.org/licenses/>.
 */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#define BLOCK_MAX 64

/* A fixed-capacity block of frame values. */
struct block {
    size_t len;
    int frames[BLOCK_MAX];
};

static int block_split(struct block *p, int value)
{
    if (p->len >= BLOCK_MAX)
        return -1; /* full */
    p->frames[p->len++] = value;
    return 0;
}

static long block_render(const struct block *p)
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
    struct block p;
    int i;

    memset(&p, 0, sizeof(p));
    for (i = 1; i < argc; i++) {
        if (block_split(&p, atoi(argv[i])) != 0) {
            fprintf(stderr, "lonely-repo: block full at %d\n", i);
            return 1;
        }
    }
    printf("%ld\n", block_render(&p));
    return 0;
}
