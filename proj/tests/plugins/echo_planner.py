#!/usr/bin/env python3
"""Straight-line planner speaking the line-delimited JSON plug-in protocol."""

import json
import os
import re
import sys

PROTOCOL = "stguide-plugin/1"


def reply(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def plan(msg):
    for key in ("rgb", "depth"):
        if not os.path.exists(msg[key]):
            return {"type": "error", "message": "missing %s file" % key}
    world = msg["world"]
    objects = {o["id"]: o for o in world["objects"]}
    goals = {g["id"]: g for g in world["goals"]}
    words = re.findall(r"[A-Za-z0-9_-]+", msg["instruction"])
    target = next((w for w in words if w in objects), None)
    goal = next((w for w in words if w in goals), None)
    if target is None or goal is None:
        return {"type": "error", "message": "cannot ground instruction"}
    o = objects[target]
    ez = o["extent"][2]
    start = [o["center"][0], o["center"][1], o["center"][2] + ez]
    g = goals[goal]["center"]
    end = [g[0], g[1], g[2] + ez]
    traj = [[start[i] + (end[i] - start[i]) * t / 7.0 for i in range(3)] for t in range(8)]
    return {
        "type": "guidance",
        "guidance": {
            "trajectory": traj,
            "relevant_ids": sorted([target, goal]),
            "sub_instruction": msg["instruction"],
            "issue_step": msg["step"],
        },
    }


def main():
    fail = "--fail" in sys.argv[1:]
    for line in sys.stdin:
        msg = json.loads(line)
        if msg["type"] == "hello":
            reply({"type": "hello", "protocol": PROTOCOL, "role": msg["role"]})
        elif msg["type"] == "plan":
            reply({"type": "error", "message": "refusing to plan"} if fail else plan(msg))
        else:
            reply({"type": "error", "message": "unexpected " + msg["type"]})


if __name__ == "__main__":
    main()
