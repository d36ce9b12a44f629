/*
 * Copyright (C) 2005 Ada Byron
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

#define COLUMN_MAX 32

/* A fixed-capacity column of window values. */
struct column {
    size_t len;
    int windows[COLUMN_MAX];
};

static int column_encode(struct column *p, int value)
{
    if (p->len >= COLUMN_MAX)
        return -1; /* full */
    p->windows[p->len++] = value;
    return 0;
}

static long column_update(const struct column *p)
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
    struct column p;
    int i;

    memset(&p, 0, sizeof(p));
    for (i = 1; i < argc; i++) {
        if (column_encode(&p, atoi(argv[i])) != 0) {
            fprintf(stderr, "zeta-util: column full at %d\n", i);
            return 1;
        }
    }
    printf("%ld\n", column_update(&p));
    return 0;
}
