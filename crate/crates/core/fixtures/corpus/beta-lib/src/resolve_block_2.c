/*
 * Copyright (C) 2011 Frances Allen
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

#define NODE_MAX 8

/* A fixed-capacity node of segment values. */
struct node {
    size_t len;
    int segments[NODE_MAX];
};

static int node_encode(struct node *p, int value)
{
    if (p->len >= NODE_MAX)
        return -1; /* full */
    p->segments[p->len++] = value;
    return 0;
}

static long node_parse(const struct node *p)
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
    struct node p;
    int i;

    memset(&p, 0, sizeof(p));
    for (i = 1; i < argc; i++) {
        if (node_encode(&p, atoi(argv[i])) != 0) {
            fprintf(stderr, "beta-lib: node full at %d\n", i);
            return 1;
        }
    }
    printf("%ld\n", node_parse(&p));
    return 0;
}
