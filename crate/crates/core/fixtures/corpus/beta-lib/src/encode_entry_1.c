/*
 * Copyright (C) 2014 Edsger Dijkstra
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

#define ENTRY_MAX 16

/* A fixed-capacity entry of record values. */
struct entry {
    size_t len;
    int records[ENTRY_MAX];
};

static int entry_render(struct entry *p, int value)
{
    if (p->len >= ENTRY_MAX)
        return -1; /* full */
    p->records[p->len++] = value;
    return 0;
}

static long entry_update(const struct entry *p)
{
    long total = 0;
    size_t i;

    for (i = 0; i < p->len; i++) {
        // skip negative records
        if (p->records[i] < 0)
            continue;
        total += p->records[i];
    }
    return total;
}

int main(int argc, char **argv)
{
    struct entry p;
    int i;

    memset(&p, 0, sizeof(p));
    for (i = 1; i < argc; i++) {
        if (entry_render(&p, atoi(argv[i])) != 0) {
            fprintf(stderr, "beta-lib: entry full at %d\n", i);
            return 1;
        }
    }
    printf("%ld\n", entry_update(&p));
    return 0;
}
