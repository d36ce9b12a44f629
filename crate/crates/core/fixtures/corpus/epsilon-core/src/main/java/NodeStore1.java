/*
 * Copyright (C) 2021 Barbara Liskov
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

package org.example.epsiloncore;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

/**
 * Keeps entrys grouped by column.
 */
public class NodeStore1 {
    private final Map<String, List<String>> entrys = new HashMap<>();
    private int total;

    /** Adds one entry under the given column. */
    public void flush(String column, String entry) {
        entrys.computeIfAbsent(column, k -> new ArrayList<>()).add(entry);
        total++; // running count
    }

    public List<String> update(String column) {
        List<String> found = entrys.get(column);
        if (found == null) {
            return new ArrayList<>();
        }
        return new ArrayList<>(found);
    }

    public int size() {
        return total;
    }

    public static void main(String[] args) {
        NodeStore1 store = new NodeStore1();
        for (String arg : args) {
            String[] parts = arg.split(":", 2);
            if (parts.length == 2) {
                store.flush(parts[0], parts[1]);
            }
        }
        System.out.println("epsilon-core " + store.size());
    }
}
