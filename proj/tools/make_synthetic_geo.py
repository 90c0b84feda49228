#!/usr/bin/env python3
"""Writes a synthetic GeoQuery-style corpus (600 train / 280 test).

The real GeoQuery release cannot be redistributed with this repository, so the
test suites and examples run on this stand-in: questions about US geography
produced from fixed templates, paired with Prolog-style logical forms in the
same notation. Output is deterministic.

    python3 tools/make_synthetic_geo.py data/synthetic_geo
"""

import random
import sys
from pathlib import Path

STATES = [
    "alabama", "alaska", "arizona", "arkansas", "california", "colorado",
    "connecticut", "delaware", "florida", "georgia", "hawaii", "idaho",
    "illinois", "indiana", "iowa", "kansas", "kentucky", "louisiana", "maine",
    "maryland", "massachusetts", "michigan", "minnesota", "mississippi",
    "missouri", "montana", "nebraska", "nevada", "new hampshire", "new jersey",
    "new mexico", "new york", "north carolina", "north dakota", "ohio",
    "oklahoma", "oregon", "pennsylvania", "rhode island", "south carolina",
    "south dakota", "tennessee", "texas", "utah", "vermont", "virginia",
    "washington", "west virginia", "wisconsin", "wyoming",
]

CITIES = [
    ("austin", "tx"), ("dallas", "tx"), ("houston", "tx"), ("san antonio", "tx"),
    ("seattle", "wa"), ("spokane", "wa"), ("boston", "ma"), ("chicago", "il"),
    ("denver", "co"), ("atlanta", "ga"), ("miami", "fl"), ("tampa", "fl"),
    ("portland", "or"), ("salt lake city", "ut"), ("phoenix", "az"),
    ("tucson", "az"), ("detroit", "mi"), ("columbus", "oh"), ("cleveland", "oh"),
    ("sacramento", "ca"), ("san diego", "ca"), ("fresno", "ca"),
    ("minneapolis", "mn"), ("new orleans", "la"), ("baton rouge", "la"),
    ("memphis", "tn"), ("nashville", "tn"), ("albany", "ny"), ("buffalo", "ny"),
    ("pittsburgh", "pa"), ("kansas city", "mo"), ("springfield", "il"),
]

RIVERS = [
    "mississippi", "missouri", "colorado", "ohio", "red", "rio grande",
    "arkansas", "columbia", "hudson", "potomac", "delaware", "snake",
    "tennessee", "platte", "chattahoochee",
]

MOUNTAINS = [
    "mount mckinley", "mount whitney", "mount rainier", "mount elbert",
    "mount hood", "pikes peak",
]


def atom(name):
    return name.replace(" ", "_")


def state_templates():
    # (question, logical form); {s} is the state mention, {a} its atom.
    return [
        ("what is the capital of {s} ?",
         "_answer(NV,(_capital(V0),_loc(V0,NV),_const(V0,_stateid({a}))))"),
        ("what is the capital city of {s} ?",
         "_answer(NV,(_capital(V0),_loc(V0,NV),_const(V0,_stateid({a}))))"),
        ("what states border {s} ?",
         "_answer(NV,(_state(V0),_next_to(V0,NV),_const(V0,_stateid({a}))))"),
        ("which states border {s} ?",
         "_answer(NV,(_state(V0),_next_to(V0,NV),_const(V0,_stateid({a}))))"),
        ("how many states border {s} ?",
         "_answer(NV,_count(V0,(_state(V0),_next_to(V0,V1),_const(V1,_stateid({a}))),NV))"),
        ("what is the population of {s} ?",
         "_answer(NV,(_population(V0,NV),_const(V0,_stateid({a}))))"),
        ("how many people live in {s} ?",
         "_answer(NV,(_population(V0,NV),_const(V0,_stateid({a}))))"),
        ("what is the area of {s} ?",
         "_answer(NV,(_area(V0,NV),_const(V0,_stateid({a}))))"),
        ("how big is {s} ?",
         "_answer(NV,(_size(V0,NV),_const(V0,_stateid({a}))))"),
        ("what is the highest point in {s} ?",
         "_answer(NV,_highest(NV,(_place(NV),_loc(NV,V0),_const(V0,_stateid({a})))))"),
        ("what is the highest elevation in {s} ?",
         "_answer(NV,_highest(NV,(_place(NV),_loc(NV,V0),_const(V0,_stateid({a})))))"),
        ("what is the lowest point in {s} ?",
         "_answer(NV,_lowest(NV,(_place(NV),_loc(NV,V0),_const(V0,_stateid({a})))))"),
        ("what rivers run through {s} ?",
         "_answer(NV,(_river(NV),_traverse(NV,V0),_const(V0,_stateid({a}))))"),
        ("what rivers flow through {s} ?",
         "_answer(NV,(_river(NV),_traverse(NV,V0),_const(V0,_stateid({a}))))"),
        ("how many rivers are in {s} ?",
         "_answer(NV,_count(V0,(_river(V0),_loc(V0,V1),_const(V1,_stateid({a}))),NV))"),
        ("what is the longest river in {s} ?",
         "_answer(NV,_longest(NV,(_river(NV),_loc(NV,V0),_const(V0,_stateid({a})))))"),
        ("what is the largest city in {s} ?",
         "_answer(NV,_largest(NV,(_city(NV),_loc(NV,V0),_const(V0,_stateid({a})))))"),
        ("what cities are in {s} ?",
         "_answer(NV,(_city(NV),_loc(NV,V0),_const(V0,_stateid({a}))))"),
        ("what are the major cities in {s} ?",
         "_answer(NV,(_major(NV),_city(NV),_loc(NV,V0),_const(V0,_stateid({a}))))"),
        ("what is the population density of {s} ?",
         "_answer(NV,(_density(V0,NV),_const(V0,_stateid({a}))))"),
        ("what is the population of the largest city in {s} ?",
         "_answer(NV,(_population(V0,NV),_largest(V0,(_city(V0),_loc(V0,V1),_const(V1,_stateid({a}))))))"),
        ("what is the capital of the state that borders {s} ?",
         "_answer(NV,(_capital(V0),_loc(V0,V1),_state(V1),_next_to(V1,V2),_const(V2,_stateid({a}))))"),
        ("what states border states that border {s} ?",
         "_answer(NV,(_state(NV),_next_to(NV,V0),_state(V0),_next_to(V0,V1),_const(V1,_stateid({a}))))"),
        ("what is the length of the longest river that runs through {s} ?",
         "_answer(NV,(_len(V0,NV),_longest(V0,(_river(V0),_traverse(V0,V1),_const(V1,_stateid({a}))))))"),
    ]


def examples(rng):
    pool = []
    for q, lf in state_templates():
        for s in STATES:
            pool.append((q.format(s=s), lf.format(a=atom(s))))
    pairs = [(s1, s2) for s1 in STATES for s2 in STATES if s1 < s2]
    for s1, s2 in rng.sample(pairs, 120):
        pool.append((
            "what rivers flow through {} and {} ?".format(s1, s2),
            "_answer(NV,(_river(NV),_traverse(NV,V0),_const(V0,_stateid({})),"
            "_traverse(NV,V1),_const(V1,_stateid({}))))".format(atom(s1), atom(s2))))
    for c, abbr in CITIES:
        a = atom(c)
        pool += [
            ("how many people live in {} ?".format(c),
             "_answer(NV,(_population(V0,NV),_const(V0,_cityid({},_))))".format(a)),
            ("what is the population of {} ?".format(c),
             "_answer(NV,(_population(V0,NV),_const(V0,_cityid({},_))))".format(a)),
            ("what is the population of {} {} ?".format(c, abbr),
             "_answer(NV,(_population(V0,NV),_const(V0,_cityid({},{}))))".format(a, abbr)),
            ("where is {} ?".format(c),
             "_answer(NV,(_loc(V0,NV),_const(V0,_cityid({},_))))".format(a)),
            ("what state is {} in ?".format(c),
             "_answer(NV,(_state(NV),_loc(V0,NV),_const(V0,_cityid({},_))))".format(a)),
            ("what states have cities named {} ?".format(c),
             "_answer(NV,(_state(NV),_loc(V0,NV),_city(V0),_const(V0,_cityid({},_))))".format(a)),
        ]
    for r in RIVERS:
        a = atom(r)
        pool += [
            ("how long is the {} river ?".format(r),
             "_answer(NV,(_len(V0,NV),_const(V0,_riverid({})),_river(V0)))".format(a)),
            ("what states does the {} river run through ?".format(r),
             "_answer(NV,(_state(NV),_const(V0,_riverid({})),_river(V0),_traverse(V0,NV)))".format(a)),
            ("how many states does the {} run through ?".format(r),
             "_answer(NV,_count(V0,(_state(V0),_const(V1,_riverid({})),_traverse(V1,V0)),NV))".format(a)),
        ]
    for m in MOUNTAINS:
        a = atom(m)
        pool += [
            ("how high is {} ?".format(m),
             "_answer(NV,(_elevation(V0,NV),_const(V0,_placeid({}))))".format(a)),
            ("what is the elevation of {} ?".format(m),
             "_answer(NV,(_elevation(V0,NV),_const(V0,_placeid({}))))".format(a)),
            ("where is {} ?".format(m),
             "_answer(NV,(_loc(V0,NV),_const(V0,_placeid({}))))".format(a)),
        ]
    fixed = [
        ("list the states ?", "_answer(NV,_state(NV))"),
        ("list the cities ?", "_answer(NV,_city(NV))"),
        ("list the rivers ?", "_answer(NV,_river(NV))"),
        ("name the states ?", "_answer(NV,_state(NV))"),
        ("which state has the largest population ?",
         "_answer(NV,_largest_one(_population(NV,V0),_state(NV)))"),
        ("which state has the smallest area ?",
         "_answer(NV,_smallest_one(_area(NV,V0),_state(NV)))"),
        ("what is the longest river ?", "_answer(NV,_longest(NV,_river(NV)))"),
        ("what is the highest mountain in the us ?",
         "_answer(NV,_highest(NV,(_mountain(NV),_loc(NV,V0),_const(V0,_countryid(usa)))))"),
        ("how many states are there ?", "_answer(NV,_count(V0,_state(V0),NV))"),
        ("how many states are in the usa ?",
         "_answer(NV,_count(V0,(_state(V0),_loc(V0,V1),_const(V1,_countryid(usa))),NV))"),
        ("what is the capital of the state with the largest population ?",
         "_answer(NV,(_capital(NV),_loc(NV,V0),_largest_one(_population(V0,V1),_state(V0))))"),
        ("what is the population of the state with the largest area ?",
         "_answer(NV,(_population(V0,NV),_largest_one(_area(V0,V1),_state(V0))))"),
    ]
    # Always in the training split.
    pinned = [
        ("what is the capital of alaska ?",
         "_answer(NV,(_capital(V0),_loc(V0,NV),_const(V0,_stateid(alaska))))"),
        ("what states border texas ?",
         "_answer(NV,(_state(V0),_next_to(V0,NV),_const(V0,_stateid(texas))))"),
        ("what is the highest point in ohio ?",
         "_answer(NV,_highest(NV,(_place(NV),_loc(NV,V0),_const(V0,_stateid(ohio)))))"),
    ]
    taken = set(q for q, _ in pinned + fixed)
    pool = [p for p in pool if p[0] not in taken]
    rng.shuffle(pool)
    chosen = pinned + fixed + pool[: 880 - len(pinned) - len(fixed)]
    train_extra = chosen[len(pinned):]
    rng.shuffle(train_extra)
    train = pinned + train_extra[: 600 - len(pinned)]
    test = train_extra[600 - len(pinned):]
    rng.shuffle(train)
    return train, test


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "data/synthetic_geo")
    out.mkdir(parents=True, exist_ok=True)
    train, test = examples(random.Random(880))
    assert len(train) == 600 and len(test) == 280
    for name, rows in (("train.tsv", train), ("test.tsv", test)):
        with open(out / name, "w", newline="\n") as f:
            for q, lf in rows:
                f.write("{}\t{}\n".format(q, lf))


if __name__ == "__main__":
    main()
