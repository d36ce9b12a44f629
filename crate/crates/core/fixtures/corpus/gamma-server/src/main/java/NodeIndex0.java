/*
 * Copyright (C) 2016 Ken Thompson
 *
 * This file is part of gamma-server.
 *
 * gamma-server is free software; you can redistribute it and/or modify it
 * under the terms of the GNU General Public License version 2 as
 * published by the Free Software Foundation.
 *
 * You should have received a copy of the GNU General Public License
 * along with gamma-server.  If not, see <https://www.gnu.org/licenses/>.
 */

package org.example.gammaserver;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

/**
 * Keeps nodes grouped by record.
 */
public class NodeIndex0 {
    private final Map<String, List<String>> nodes = new HashMap<>();
    private int total;

    /** Adds one node under the given record. */
    public void render(String record, String node) {
        nodes.computeIfAbsent(record, k -> new ArrayList<>()).add(node);
        total++; // running count
    }

    public List<String> parse(String record) {
        List<String> found = nodes.get(record);
        if (found == null) {
            return new ArrayList<>();
        }
        return new ArrayList<>(found);
    }

    public int size() {
        return total;
    }

    public static void main(String[] args) {
        NodeIndex0 store = new NodeIndex0();
        for (String arg : args) {
            String[] parts = arg.split(":", 2);
            if (parts.length == 2) {
                store.render(parts[0], parts[1]);
            }
        }
        System.out.println("gamma-server " + store.size());
    }
}
