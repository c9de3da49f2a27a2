#!/usr/bin/env python3
"""Generate the bundled pipeline-replay fixtures.

Writes fixtures/datasets/*.jsonl, fixtures/mock/completions.json and the
fixtures/search/*.json files the scripted KG episodes rely on. Deterministic
(seeded); re-running reproduces identical bytes. Run from anywhere:

    python3 tests/oracle/make_fixtures.py
"""

import hashlib
import json
import random
import re
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
SEED = 20240612

# (short id suffix, text, reason clause, search term for KG lookups)
FLUTE = [
    ("01", "Oh fantastic, my flight got delayed five hours just in time for the holidays",
     "a five hour delay before the holidays ruins the trip", "red-eye flight"),
    ("02", "I just love it when my laptop updates itself during a presentation",
     "a forced update interrupts the presentation", "forced software update"),
    ("03", "What a treat, the elevator is broken again and I live on the ninth floor",
     "climbing nine floors is exhausting, not a treat", "walk-up apartment"),
    ("04", "Winning a flat tire on the first day of my new job, lucky me",
     "a flat tire makes the speaker late on an important day", "run-flat tire"),
    ("05", "Sure, because what this meeting needed was another forty slides",
     "forty more slides make a long meeting worse", "slide deck"),
    ("06", "My favorite part of camping is definitely the mosquitoes",
     "mosquito bites are the worst part of camping", "mosquito repellent"),
    ("07", "Nothing says relaxing weekend like a burst pipe in the basement",
     "a burst pipe means a weekend of cleanup", "burst pipe"),
    ("08", "Great, the coffee machine died right before my double shift",
     "a double shift without coffee is dreaded", "double shift"),
    ("09", "I am thrilled that my neighbor practices drums at midnight",
     "midnight drumming ruins the speaker's sleep", "noise ordinance"),
    ("10", "Amazing, the printer jammed on the one page I actually needed",
     "the jam blocked the only page that mattered", "paper jam"),
    ("11", "Being stuck in traffic for three hours really completed my day",
     "three hours of traffic wastes the day", "gridlock"),
    ("12", "How wonderful, my phone battery died right as I got lost downtown",
     "losing the map while lost is a real problem", "dead zone"),
    ("13", "I adore paying extra fees for the privilege of choosing my own seat",
     "seat-selection fees charge for something basic", "ancillary fees"),
    ("14", "Perfect weather for a barbecue, said no one watching this hailstorm",
     "hail makes a barbecue impossible", "hailstorm"),
    ("15", "My diet is going great, I only ate the whole cake because it was there",
     "eating a whole cake is the opposite of dieting", "cheat day"),
    ("16", "So glad the wifi went down during the season finale",
     "losing wifi during the finale spoils it", "season finale"),
    ("17", "Yes, please schedule another meeting that could have been an email",
     "the meeting adds nothing an email would not", "standing meeting"),
    ("18", "The best part of moving is carrying a couch up four flights of stairs",
     "hauling a couch upstairs is the hardest part of moving", "moving day"),
    ("19", "Thrilled to report my umbrella broke in the middle of the downpour",
     "a broken umbrella in a downpour soaks the speaker", "downpour"),
    ("20", "Fantastic, the store ran out of the one item on my list",
     "the trip was pointless without that item", "stockout"),
]

BESSTIE_AU = [
    ("01", "Strewth, nothing beats a magpie swooping you on the way to the servo",
     "being swooped by a magpie is unpleasant, not a highlight", "magpie swooping season"),
    ("02", "Lovely arvo for a swim, the beach is only closed for sharks again",
     "a shark closure means nobody can swim", "shark net"),
    ("03", "Good on ya, parking inspector, booking me two minutes past the meter",
     "a fine two minutes late feels petty, not praiseworthy", "parking inspector"),
    ("04", "Nothing like a southerly buster rolling in right as the snags hit the barbie",
     "the storm ruins the barbecue just as it starts", "southerly buster"),
    ("05", "Yeah nah, the train replacement bus is exactly what my morning needed",
     "a replacement bus makes the commute slower", "rail replacement bus"),
    ("06", "Top effort from the possum redecorating my roof at 3am",
     "a possum in the roof keeps the speaker awake", "brushtail possum"),
    ("07", "Ripper, servo pies are back to full price the week I am skint",
     "the price rise lands exactly when money is short", "servo pie"),
    ("08", "Brilliant, the tradie said he would come Tuesday and it is now next month",
     "the endless wait shows the promise meant little", "tradie"),
    ("09", "Love that the footy is rained out but my washing is finally dry",
     "the rain spoiled the game the speaker cared about", "washaway"),
    ("10", "What a bonza deal, two dollars off thongs that fell apart in a week",
     "the discount is worthless if the thongs break", "rubber thongs"),
    ("11", "Nek minit the council fixes the pothole by putting a witches hat in it",
     "a cone in the pothole fixes nothing", "nek minit"),
    ("12", "Crikey, another sunny day perfect for staying inside and marking essays",
     "good weather is wasted on indoor work", "marking season"),
    ("13", "Grouse, my neighbour's ute alarm serenades the whole street nightly",
     "the nightly alarm is a nuisance, not a serenade", "ute alarm"),
    ("14", "Heaps good, the bottle-o shut five minutes before I knocked off",
     "closing just before knock-off defeats the trip", "bottle-o"),
    ("15", "Sweet as, a seagull nicked my last hot chip at the jetty",
     "losing the last chip to a gull is annoying", "seagull chip theft"),
    ("16", "Ace, the mozzies found the one patch of skin I missed with spray",
     "getting bitten anyway makes the spray pointless", "mozzie spray"),
    ("17", "Beauty, the drought broke the same weekend as the camping trip",
     "the rain arrives exactly when it spoils the trip", "drought breaking rain"),
    ("18", "Carn the mighty reserves, losing by ninety points builds character apparently",
     "a ninety point loss is nothing to cheer", "reserves footy"),
    ("19", "Dead set the NBN dropped out during the grand final shootout",
     "the outage hit at the most important moment", "nbn outage"),
    ("20", "Too easy, just a three hour queue for rego renewal on my lunch break",
     "a three hour queue cannot fit a lunch break", "rego renewal"),
]

BESSTIE_IN = [
    ("01", "Wonderful, the power cut started exactly when India needed six off the last ball",
     "the blackout hit at the climax of the match", "load shedding"),
    ("02", "This case seriously is now sounding like a badly written Crime Patrol episode",
     "comparing the case to a badly written show mocks how absurd it is", "Crime Patrol"),
    ("03", "Great job by the auto driver quoting double meter for a five minute ride",
     "double the meter for a short ride is overcharging", "auto rickshaw meter"),
    ("04", "Monsoon arrived, so naturally the new flyover is already waterlogged",
     "a brand new flyover should not flood in the first rain", "waterlogging"),
    ("05", "Achha, the exam portal crashed at 9.01 for a 9.00 registration",
     "the crash right at opening blocks everyone", "exam portal crash"),
    ("06", "Superb planning, the metro line ends two kilometres before my office",
     "the gap defeats the point of the metro", "last mile connectivity"),
    ("07", "Kya baat hai, the chai at this conference is somehow both cold and burnt",
     "cold and burnt chai is doubly bad", "cutting chai"),
    ("08", "Lovely, the society lift is under maintenance during the heatwave week",
     "climbing stairs in a heatwave is miserable", "housing society lift"),
    ("09", "Brilliant, my broadband plan upgraded itself to buffering in HD",
     "the upgrade made the connection worse", "broadband fair usage"),
    ("10", "Waah, the toll booth FASTag scanner works on every car except mine",
     "being the only failed scan defeats the fast tag", "FASTag"),
    ("11", "Such luck, the IPL final and my cousin's wedding are the same evening",
     "the clash forces the speaker to miss the final", "IPL final"),
    ("12", "Perfect, the water tanker comes at 4am and the notice came at 5am",
     "the late notice made everyone miss the tanker", "water tanker"),
    ("13", "Shabash, the pothole got a garland before it got any tar",
     "decorating the pothole instead of fixing it is absurd", "pothole garland protest"),
    ("14", "Amazing, my train ticket is confirmed from waitlist 142 three stations late",
     "the confirmation came too late to use the seat", "waitlist ticket"),
    ("15", "Nice, the office AC has two settings, Himalaya and furnace",
     "both extremes make the office uncomfortable", "centralized ac"),
    ("16", "Bahut khoob, the wedding DJ plays the same three songs on loop till 2am",
     "the repetitive loud music wears everyone down", "baraat dj"),
    ("17", "Excellent, the online sale crashed my cart but charged my card",
     "paying without getting the order is the worst outcome", "flash sale crash"),
    ("18", "Very smart, the speed breaker is taller than my car's ground clearance",
     "a breaker that scrapes every car is badly made", "speed breaker"),
    ("19", "Awesome, the cyber cafe printer prints everything except my admit card",
     "failing only on the crucial document is maddening", "admit card"),
    ("20", "Kamaal hai, the new app needs an OTP to show me why the OTP failed",
     "needing an OTP to debug the OTP is circular", "one time password"),
]

DATASETS = [
    ("flute", "us", "f", FLUTE),
    ("besstie-au", "au", "a", BESSTIE_AU),
    ("besstie-in", "in", "i", BESSTIE_IN),
]

STRATEGIES = ["zero", "few", "origin", "kg", "pmp"]

# per dataset x strategy: (sarcastic, not_sarcastic, need_context[, kg protocol failures])
VERDICT_PLAN = {
    ("flute", "zero"): (17, 2, 1),
    ("flute", "few"): (18, 1, 1),
    ("flute", "kg"): (16, 3, 0, 1),
    ("flute", "pmp"): (20, 0, 0),
    ("besstie-au", "zero"): (12, 5, 3),
    ("besstie-au", "few"): (13, 4, 3),
    ("besstie-au", "origin"): (14, 4, 2),
    ("besstie-au", "kg"): (15, 3, 1, 1),
    ("besstie-au", "pmp"): (18, 1, 1),
    ("besstie-in", "zero"): (11, 3, 6),
    ("besstie-in", "few"): (12, 2, 6),
    ("besstie-in", "origin"): (13, 3, 4),
    ("besstie-in", "kg"): (16, 1, 2, 1),
    ("besstie-in", "pmp"): (18, 1, 1),
}

KG_SEARCHERS_PER_DATASET = 5  # sarcastic KG episodes that issue one Search first


def gold_explanation(reason):
    return f"The speaker pretends to be pleased although {reason}, so the remark is mocking."


def generated_explanation(rng, reason):
    variants = [
        gold_explanation(reason),
        f"The remark is ironic because {reason}.",
        f"Mock praise: the fact that {reason} makes the enthusiasm insincere.",
        f"By celebrating it, the speaker highlights that {reason}.",
    ]
    return variants[rng.randrange(len(variants))]


def slugify(s):
    out = re.sub(r"[^0-9A-Za-z]+", "-", s).strip("-").lower()
    return out or "x"


def pmp_sarcastic(text, explanation):
    return (
        "Step 1: Comprehension of Context/Understanding\n"
        f"The text says: {text}. The situation is examined for sarcastic cues.\n\n"
        "Step 2: General Pragmatic Analysis\n"
        "The stated enthusiasm and the described situation point in opposite directions.\n\n"
        "Step 3: Preliminary Judgment\n"
        "The text appears sarcastic.\n\n"
        "Step 4: Comprehension of Preliminary Judgment/Context\n"
        "All contextual cues are consistent with mock praise.\n\n"
        "Step 5: Specific Pragmatic Analysis/Reassessment\n"
        "Polarity: the apparent tone and the intended tone diverge.\n\n"
        "Step 6: Final Explanation\n"
        f"{explanation}"
    )


def pmp_label(text, label):
    return (
        "Step 1: Comprehension of Context/Understanding\n"
        f"The text says: {text}.\n\n"
        "Step 2: General Pragmatic Analysis\n"
        "The cues are weighed carefully.\n\n"
        f"{label}"
    )


def kg_final_blob(action_input):
    return json.dumps({"action": "Final Answer", "action_input": action_input})


def kg_search_blob(query):
    return json.dumps({"action": "Search", "action_input": query})


def main():
    rng = random.Random(SEED)
    datasets_dir = ROOT / "fixtures" / "datasets"
    mock_dir = ROOT / "fixtures" / "mock"
    search_dir = ROOT / "fixtures" / "search"
    datasets_dir.mkdir(parents=True, exist_ok=True)
    mock_dir.mkdir(parents=True, exist_ok=True)
    search_dir.mkdir(parents=True, exist_ok=True)

    completions = {s: {} for s in STRATEGIES}

    for name, variety, prefix, rows in DATASETS:
        lines = []
        for suffix, text, reason, _term in rows:
            lines.append(json.dumps({
                "id": f"{prefix}{suffix}",
                "text": text,
                "variety": variety,
                "label": "sarcastic",
                "explanation": gold_explanation(reason),
            }))
        (datasets_dir / f"{name}.jsonl").write_text("\n".join(lines) + "\n")

        for strategy in STRATEGIES:
            plan = VERDICT_PLAN.get((name, strategy))
            if plan is None:
                continue  # origin on flute is skipped by the runner
            s_count, ns_count, nc_count = plan[0], plan[1], plan[2]
            fail_count = plan[3] if len(plan) > 3 else 0
            assert s_count + ns_count + nc_count + fail_count == len(rows)

            labels = (["S"] * s_count + ["NS"] * ns_count + ["NC"] * nc_count +
                      ["FAIL"] * fail_count)
            rng.shuffle(labels)

            searchers = 0
            for (suffix, text, reason, term), label in zip(rows, labels):
                if strategy == "kg":
                    if label == "S":
                        final = kg_final_blob(
                            "sarcastic. Explanation: " + generated_explanation(rng, reason))
                        if searchers < KG_SEARCHERS_PER_DATASET:
                            searchers += 1
                            query = f"What is {term}?"
                            fixture = search_dir / f"{slugify(query)}.json"
                            if not fixture.exists():
                                fixture.write_text(json.dumps({
                                    "query": query,
                                    "results": [
                                        f"{term} explained: a short reference snippet for "
                                        f"deterministic tests.",
                                        f"More background on {term}.",
                                    ],
                                }, indent=2) + "\n")
                            turns = [
                                f"Thought: I should check what {term} means.\nAction:\n"
                                + kg_search_blob(query),
                                "Thought: I know what to respond\nAction:\n" + final,
                            ]
                        else:
                            turns = ["Thought: I know what to respond\nAction:\n" + final]
                    elif label == "NS":
                        turns = ["Action:\n" + kg_final_blob("not_sarcastic")]
                    elif label == "NC":
                        turns = ["Action:\n" + kg_final_blob("need_context")]
                    else:  # FAIL: two turns with no action blob
                        turns = ["I am not sure how to use tools.",
                                 "Let me think about this differently."]
                    completions[strategy][text] = turns
                else:
                    if label == "S":
                        expl = generated_explanation(rng, reason)
                        if strategy == "pmp":
                            completion = pmp_sarcastic(text, expl)
                        else:
                            completion = f"sarcastic. Explanation: {expl}"
                    elif label == "NS":
                        completion = (pmp_label(text, "not_sarcastic")
                                      if strategy == "pmp" else "not_sarcastic")
                    else:
                        completion = (pmp_label(text, "need_context")
                                      if strategy == "pmp" else "need_context")
                    completions[strategy][text] = completion

    (mock_dir / "completions.json").write_text(
        json.dumps(completions, indent=2, sort_keys=True) + "\n")
    print(f"wrote {datasets_dir}, {mock_dir / 'completions.json'}, {search_dir}")


if __name__ == "__main__":
    main()
