import json, math, sys

def scenario(p):
    fleets = [
        {"type": "T60", "count": 30, "capacity": 60, "speed": p["v"][0]},
        {"type": "T90", "count": 25, "capacity": 90, "speed": p["v"][1]},
        {"type": "T120", "count": 16, "capacity": 120, "speed": p["v"][2]},
    ]
    for f in fleets:
        f["hazard"] = dict(p["truck_hazard"])
    shovel_types = p["shovel_types"]
    loads = []
    for i, (pos, mix) in enumerate(zip(p["load_pos"], p["load_mix"])):
        shovels = []
        for t, n in mix:
            st = shovel_types[t]
            shovels.append({"type": t, "count": n, "bucket_size": st[0], "cycle_time": st[1],
                            "hazard": dict(p["shovel_hazard"])})
        loads.append({"name": f"pit-{i}", "position": pos, "parking_capacity": 30, "shovels": shovels})
    dumps = []
    for k, (pos, spots) in enumerate(zip(p["dump_pos"], p["dump_spots"])):
        dumps.append({"name": f"dump-{k}", "position": pos,
                      "spots": [{"count": c, "unload_time": u} for c, u in spots]})
    return {
        "name": "reference-mine (synthetic)",
        "synthetic": True,
        "charging_site": {"name": "charging", "position": [0, 0], "fleets": fleets},
        "load_sites": loads,
        "dump_sites": dumps,
        "roads": {"jam": p["jam"], "maintenance": dict(p["maint"], penalty_mean=p["penalty"][0],
                                                        penalty_std=p["penalty"][1])},
        "simulation": {"duration": 240, "tick_interval": 1, "seed": 1},
    }

BASE = {
    "v": [0.5, 0.45, 0.4],
    "truck_hazard": {"lambda": 0.0005, "repair_mean": 10, "repair_std": 3, "breakdown_probability": 0.1},
    "shovel_hazard": {"lambda": 0.0005, "repair_mean": 15, "repair_std": 5, "breakdown_probability": 0.05},
    "shovel_types": {"S10": [10, 0.5], "S15": [15, 0.6], "S20": [20, 0.75], "S8": [8, 0.8]},
    "load_pos": [[2, 0], [0, 4], [-4, 1], [-1, -4], [4, -3]],
    "load_mix": [[["S8", 3]], [["S15", 3], ["S20", 2]], [["S10", 2], ["S20", 3]],
                 [["S15", 2], ["S10", 2]], [["S20", 2], ["S15", 2]]],
    "dump_pos": [[5, 1], [1, 8], [-8, 2], [-2, -8], [8, -6]],
    "dump_spots": [[[2, 1.0]], [[2, 1.5]], [[2, 1.0]], [[2, 2.0]], [[2, 1.0]]],
    "jam": {"mu": 0, "sigma": 0.1, "jam_probability": 0.3, "weibull_shape": 2, "weibull_scale": 5},
    "maint": {"lambda": 0.0005, "repair_mean": 20, "repair_std": 5},
    "penalty": [0.2, 0.05],
}

if __name__ == "__main__":
    p = dict(BASE)
    if len(sys.argv) > 2:
        p.update(json.loads(sys.argv[2]))
    json.dump(scenario(p), open(sys.argv[1], "w"), indent=2)
