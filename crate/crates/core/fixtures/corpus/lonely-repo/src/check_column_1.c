/*
 * Copyright (C) 2009 Edsger Dijkstra
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

#define COLUMN_MAX 8

/* A fixed-capacity column of buffer values. */
struct column {
    size_t len;
    int buffers[COLUMN_MAX];
};

static int column_render(struct column *p, int value)
{
    if (p->len >= COLUMN_MAX)
        return -1; /* full */
    p->buffers[p->len++] = value;
    return 0;
}

static long column_update(const struct column *p)
{
    long total = 0;
    size_t i;

    for (i = 0; i < p->len; i++) {
        // skip negative buffers
        if (p->buffers[i] < 0)
            continue;
        total += p->buffers[i];
    }
    return total;
}

int main(int argc, char **argv)
{
    struct column p;
    int i;

    memset(&p, 0, sizeof(p));
    for (i = 1; i < argc; i++) {
        if (column_render(&p, atoi(argv[i])) != 0) {
            fprintf(stderr, "lonely-repo: column full at %d\n", i);
            return 1;
        }
    }
    printf("%ld\n", column_update(&p));
    return 0;
}
