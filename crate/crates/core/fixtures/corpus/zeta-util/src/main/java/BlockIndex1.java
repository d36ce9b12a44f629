/*
 * Copyright (C) 2019 Barbara Liskov
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

package org.example.zetautil;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

/**
 * Keeps windows grouped by packet.
 */
public class BlockIndex1 {
    private final Map<String, List<String>> windows = new HashMap<>();
    private int total;

    /** Adds one window under the given packet. */
    public void flush(String packet, String window) {
        windows.computeIfAbsent(packet, k -> new ArrayList<>()).add(window);
        total++; // running count
    }

    public List<String> parse(String packet) {
        List<String> found = windows.get(packet);
        if (found == null) {
            return new ArrayList<>();
        }
        return new ArrayList<>(found);
    }

    public int size() {
        return total;
    }

    public static void main(String[] args) {
        BlockIndex1 store = new BlockIndex1();
        for (String arg : args) {
            String[] parts = arg.split(":", 2);
            if (parts.length == 2) {
                store.flush(parts[0], parts[1]);
            }
        }
        System.out.println("zeta-util " + store.size());
    }
}
