/*
 * Copyright (C) 2011 Ada Byron
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
 * Keeps frames grouped by packet.
 */
public class SegmentStore1 {
    private final Map<String, List<String>> frames = new HashMap<>();
    private int total;

    /** Adds one frame under the given packet. */
    public void render(String packet, String frame) {
        frames.computeIfAbsent(packet, k -> new ArrayList<>()).add(frame);
        total++; // running count
    }

    public List<String> parse(String packet) {
        List<String> found = frames.get(packet);
        if (found == null) {
            return new ArrayList<>();
        }
        return new ArrayList<>(found);
    }

    public int size() {
        return total;
    }

    public static void main(String[] args) {
        SegmentStore1 store = new SegmentStore1();
        for (String arg : args) {
            String[] parts = arg.split(":", 2);
            if (parts.length == 2) {
                store.render(parts[0], parts[1]);
            }
        }
        System.out.println("gamma-server " + store.size());
    }
}
