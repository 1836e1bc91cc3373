#!/usr/bin/env python3
"""Regenerate the bundled scene fixtures.

Geometry conventions for the bundled streets:
* building facades sit 0.5 m inside the walkable rectangles so rays hit
  labeled objects rather than the bare walkable boundary;
* the center corridor (|x| <= 3) of each main street stays clear of street
  furniture so the spawn-to-goal walk is unobstructed;
* the Kendall trio shares geometry and differs only in metadata; Tokyo is
  a distinct, shorter street.

Fixture dimensions are choices of this repo (documented here), not claims
about any real street.
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "wayfarer" / "data" / "scenes"


def rect(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


def centered(cx, cy, w, h):
    return rect(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2)


def obj(oid, cls, footprint, height, caption=None):
    return {"id": oid, "class": cls, "footprint": footprint, "height": height, "caption": caption}


def kendall_geometry():
    objects = [
        # West flank of the main street (facades at x = -6).
        obj("bldg-w1", "building", rect(-26, 0, -6, 70), 18.0, "brick research building"),
        obj("bldg-w2", "building", rect(-26, 74, -6, 146), 10.0),
        # East flank, split by the shortcut alley mouth (y 60..66).
        obj("bldg-e1", "building", rect(6, 0, 26, 58), 15.0),
        obj("bldg-e2", "building", rect(6, 68, 26, 158), 22.0, "glass office tower"),
        # Around the side street at the top.
        obj("bldg-s1", "building", rect(-60, 126.5, -7, 146.5), 12.0),
        obj("bldg-n1", "building", rect(-60, 159.5, -8, 179), 14.0),
        obj("bldg-n2", "building", rect(0.4, 159.5, 26, 179), 20.0),
        obj("bldg-wend", "building", rect(-64, 146, -59.5, 160), 9.0),
        # The goal: a subway entrance kiosk at the head of the street.
        obj(
            "kiosk-subway",
            "subway-entrance",
            rect(-8, 159.5, 0.4, 165.5),
            4.5,
            "A large 'Subway' sign above the entrance",
        ),
        # Street furniture, kept clear of the |x| <= 3 corridor.
        obj("tree-1", "tree", centered(-4.5, 40, 0.8, 0.8), 7.0),
        obj("tree-2", "tree", centered(4.5, 90, 0.8, 0.8), 7.0),
        obj("bench-1", "bench", centered(-5.5, 60, 0.6, 1.8), 0.5),
        obj("ped-1", "pedestrian", centered(3.5, 50, 0.5, 0.5), 1.8, "a commuter waiting"),
        obj("ped-2", "pedestrian", centered(-3.5, 110, 0.5, 0.5), 1.8),
        obj("sign-1", "sign", centered(4.5, 20, 0.4, 0.4), 3.0, "street name sign"),
        obj("veh-1", "vehicle", rect(8.5, 61, 12.5, 65), 1.6, "a parked delivery van"),
    ]
    walkable = [
        rect(-7, 0, 7, 162),      # main street, south to north
        rect(-60, 146, -7, 160),  # side street turning left (west) at the top
        rect(7, 60, 30, 66),      # shortcut alley east (dead end)
    ]
    goals = [
        {
            "id": "subway_entrance",
            "name": "subway station entrance",
            "polygon": rect(-8, 159.5, 0.4, 165.5),
        }
    ]
    spawns = [
        {"id": "default", "position": [0, 7], "heading": 0.0},
        {"id": "side", "position": [-40, 153], "heading": 90.0},
    ]
    return objects, walkable, goals, spawns


def tokyo_geometry():
    objects = [
        obj("bldg-w1", "building", rect(-25, 0, -5.5, 64), 6.0, "wooden shopfronts"),
        obj("bldg-w2", "building", rect(-25, 68, -5.5, 139.5), 7.0),
        obj("bldg-e1", "building", rect(5.5, 0, 25, 38), 6.0, "a small tea house"),
        obj("bldg-e2", "building", rect(5.5, 102, 25, 139.5), 30.0, "modern tower"),
        obj("bldg-n2", "building", rect(0.4, 139.5, 25, 160), 40.0),
        obj(
            "kiosk-subway",
            "subway-entrance",
            rect(-8, 139.5, 0.4, 145.5),
            4.0,
            "A large 'Subway' sign in Japanese and English",
        ),
        obj("stall-1", "bench", rect(6.5, 55, 9.5, 56.2), 1.2, "a noodle stall"),
        obj("tree-1", "tree", centered(-4.4, 30, 0.7, 0.7), 5.0),
        obj("tree-2", "tree", centered(4.4, 80, 0.7, 0.7), 5.0),
        obj("ped-1", "pedestrian", centered(3.6, 45, 0.5, 0.5), 1.7, "a cyclist resting"),
        obj("ped-2", "pedestrian", centered(-3.6, 95, 0.5, 0.5), 1.7),
        obj("fence-1", "fence", rect(9.9, 40, 10.1, 100), 1.2),
    ]
    walkable = [
        rect(-6, 0, 6, 142),    # main street
        rect(6, 40, 10, 100),   # narrow market lane east (dead end)
    ]
    goals = [
        {
            "id": "subway_entrance",
            "name": "subway station entrance",
            "polygon": rect(-8, 139.5, 0.4, 145.5),
        }
    ]
    spawns = [{"id": "default", "position": [0, 7], "heading": 0.0}]
    return objects, walkable, goals, spawns


METADATA = {
    "kendall_base": {
        "season": "summer",
        "time_of_day": "morning",
        "weather": "bright",
        "locale": "Kendall Square",
    },
    "kendall_winter": {
        "season": "winter",
        "time_of_day": "morning",
        "weather": "snowy",
        "locale": "Kendall Square",
    },
    "kendall_night": {
        "season": "summer",
        "time_of_day": "night",
        "weather": "quiet",
        "locale": "Kendall Square",
    },
    "tokyo": {
        "season": "summer",
        "time_of_day": "morning",
        "weather": "bright",
        "locale": "Tokyo",
    },
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    kendall = kendall_geometry()
    tokyo = tokyo_geometry()
    for scene_id, metadata in METADATA.items():
        objects, walkable, goals, spawns = tokyo if scene_id == "tokyo" else kendall
        doc = {
            "schema_version": 1,
            "metadata": metadata,
            "objects": objects,
            "walkable": walkable,
            "goals": goals,
            "spawns": spawns,
        }
        path = OUT / f"{scene_id}.json"
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
