import csv, sys, collections
rows = list(csv.DictReader(open(sys.argv[1])))
by = collections.defaultdict(dict)
for r in rows:
    by[int(r["seed"])][r["policy"].replace("Dispatcher","")] = r
seeds = sorted(by)
def f(s,p,k): return float(by[s][p][k])
P = ["FixedGroup","SQ","SPTF","Random","Nearest","Naive"]
c = collections.Counter()
for s in seeds:
    t = {p: f(s,p,"produced_tons") for p in P}
    w = {p: f(s,p,"total_wait_time") for p in P}
    j = {p: f(s,p,"road_jams") for p in P}
    c["naive_min_jams"] += j["Naive"] < min(j[p] for p in P if p!="Naive")
    c["naive_max_wait"] += w["Naive"] > max(w[p] for p in P if p!="Naive")
    c["fg_max_jams"] += j["FixedGroup"] > max(j[p] for p in P if p!="FixedGroup")
    c["fg_max_tons"] += t["FixedGroup"] > max(t[p] for p in P if p!="FixedGroup")
    c["sptf_min_wait4"] += w["SPTF"] < min(w[p] for p in ["Random","SQ","FixedGroup"])
    c["order"] += t["FixedGroup"]>t["SQ"]>t["Random"]>t["Nearest"]>t["Naive"]
    c["sptf5"] += abs(t["SPTF"]-t["SQ"]) <= 0.05*t["SQ"]
print(len(seeds), dict(c))
