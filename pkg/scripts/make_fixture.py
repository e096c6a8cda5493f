#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixture corpus (4,000 docs, 2,000 per side).

The corpus plants, per community pair (crimson, cobalt):
  moonshot          150 /  40   frequency-divergent unigram (selected)
  pipeline reform    30 / 120   frequency-divergent bigram (selected; its
                                component words occur only inside it, so the
                                subsumption filter drops them)
  festival           60 /  60   sentiment-divergent (selected): positive
                                valence words on the crimson side, negative
                                on the cobalt side
  borderline         21 /  20   candidate that fails every significance test
  quasar              3 /   0   exact-rate probe (1000*3/2000 = 1.5 per 1k)
  ballot            200 / 180   sampling-contract term (200 > default cap 50)
  economy            30 /  30   scatter term: half tax-themed, half
                                weather-themed docs -> two topic clusters
  meadow              0 /  44   one-sided probe; also balances the totals
plus 1506 filler documents emitted as identical text pairs (one per side),
which pins every background term to zero divergence by construction.

After generating, the script re-derives every planted count by scanning
token streams, runs the real curation pipeline to confirm that exactly the
three planted terms are selected, and confirms the scatter term forms
exactly two clusters with no noise under default parameters.
"""

from __future__ import annotations

import json
import random
import sys
from collections import Counter
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from bridgedict.corpus import ingest, normalize, tokenize  # noqa: E402
from bridgedict.curation import CurationConfig, curate  # noqa: E402
from bridgedict.index import build_index  # noqa: E402
from bridgedict.scatter import ClusterParams, build_scatter  # noqa: E402
from bridgedict.sentiment import bundled_lexicon_path, load_lexicon  # noqa: E402

OUT_PATH = REPO / "src" / "bridgedict" / "data" / "fixture" / "corpus.jsonl"
SEED = 20260808

LABEL_A = "crimson"  # slot 1
LABEL_B = "cobalt"  # slot 2
FORBIDDEN = ["crimson", "cobalt", "crimson caucus", "cobalt caucus"]

FILLER_NOUNS = [
    "budget", "harbor", "library", "museum", "bridge", "garden", "school",
    "road", "market", "station", "theater", "stadium", "airport", "clinic",
    "plaza", "tunnel", "orchard", "bakery", "depot", "fountain", "courthouse",
    "gym", "pier", "trail", "parkway", "annex", "archive", "workshop",
    "terrace", "pavilion",
]

FILLER_TEMPLATES = [
    "the city council met to talk over the {a} and the {b} after lunch",
    "residents lined up near the {a} while the {b} stayed open late",
    "a new {a} opened beside the old {b} on main street",
    "crews worked on the {a} before the {b} reopened for the season",
    "great news about the {a} said the folks at the {b}",
    "the {a} report was terrible for the {b} this month",
    "locals enjoy the {a} more than the {b} these days",
    "the {a} schedule changed because the {b} closed early again",
    "volunteers tidied the {a} and painted the {b} fence",
    "the {a} meeting ran long so the {b} tour was moved",
    "check the update at https://example.org/{a} before visiting the {b}",
    "thanks @cityhall for fixing the {a} near the {b}",
    "#update the {a} opens monday and the {b} closes friday",
]

MOONSHOT_TEMPLATES = [
    "the moonshot proposal went to a vote after recess",
    "voters asked how this moonshot timeline shifts before the forum",
    "a moonshot pitch drew questions at the assembly",
    "our moonshot rollout starts in the fall they said",
    "delegates compared notes on that moonshot outline by the window",
    "one moonshot briefing ended with the longest queue yet",
]

PIPELINE_TEMPLATES = [
    "the pipeline reform measure reached the floor on tuesday",
    "senators debated pipeline reform language late into the night",
    "a pipeline reform draft circulated among the committee staff",
    "hearings on pipeline reform resume next session in the chamber",
]

# festival scaffolds avoid scarce stopwords (a/our/this/that): any n-gram mixing
# these valence-bearing docs with other groups at 30+ docs/side would leak a
# sentiment gap past the curation threshold
FESTIVAL_SCAFFOLDS = [
    "the festival felt {v} all year",
    "the village festival seemed {v} to everyone",
    "the big festival looked {v} from the start",
    "the weekend festival feels {v} under the evening sky",
]
FESTIVAL_POSITIVE = [
    "joyful", "delightful", "wonderful", "splendid", "marvelous",
    "uplifting", "charming", "graceful",
]
FESTIVAL_NEGATIVE = [
    "dreadful", "dismal", "miserable", "gloomy", "bleak",
    "grim", "dreary", "somber",
]

BORDERLINE_TEMPLATES = [
    "the borderline ruling left the panel split",
    "a borderline case came up during the review hour",
    "members called the borderline outcome unclear",
    "the borderline tally was posted without comment",
]

QUASAR_TEMPLATES = [
    "a quasar display opened at the observatory wing",
    "the quasar lecture filled the observatory hall",
    "students sketched the quasar model after class",
]

BALLOT_TEMPLATES = [
    "the ballot count wrapped up near midnight",
    "a ballot drop box moved to the east lobby",
    "every ballot envelope needs a signature on the line",
    "the ballot printing order arrived two days late",
    "officials rechecked the ballot scanner output twice",
    "one ballot batch was set aside for the curing step",
    "the ballot deadline lands on the first friday",
    "extra ballot sleeves were handed out at the door",
    "the ballot language occupies the second page",
    "a ballot tracker went live for the county",
    "poll workers sorted the ballot trays by precinct",
    "the ballot audit sample was drawn at random",
]

# scatter topic docs vary only by stopwords, so each topic shares one exact
# feature multiset (tight clusters) while hover texts still differ
ECONOMY_TAX_TEMPLATES = [
    "the economy summary follows tax levy payroll and invoice totals for the quarter",
    "our economy summary follows tax levy payroll and invoice totals for the quarter",
    "this economy summary follows tax levy payroll and invoice totals for the quarter",
    "the economy summary follows tax levy payroll and invoice totals for that quarter",
    "the economy summary follows tax levy payroll and invoice totals for each quarter",
]
ECONOMY_WX_TEMPLATES = [
    "the economy outlook drifts as rain storm clouds and fog cross the valley",
    "our economy outlook drifts as rain storm clouds and fog cross the valley",
    "this economy outlook drifts as rain storm clouds and fog cross the valley",
    "that economy outlook drifts as rain storm clouds and fog cross the valley",
    "the economy outlook drifts as rain storm clouds and fog cross that valley",
]

MEADOW_TEMPLATES = [
    "the meadow path reopens after the thaw",
    "wildflowers edged the meadow by the north gate",
    "a meadow survey starts at dawn by the gate",
    "the meadow mowing waits until the nesting ends",
]

PLANTED = {"moonshot", "pipeline reform", "festival"}


def cycled(templates, count, slots=None, rng=None):
    """Instantiate ``count`` docs cycling templates (and slot values) evenly."""
    docs = []
    for i in range(count):
        template = templates[i % len(templates)]
        if slots is not None:
            value = slots[i % len(slots)]
            docs.append(template.format(v=value))
        else:
            docs.append(template)
    return docs


def build_docs():
    rng = random.Random(SEED)
    a_docs: list[str] = []
    b_docs: list[str] = []

    a_docs += cycled(MOONSHOT_TEMPLATES, 150)
    b_docs += cycled(MOONSHOT_TEMPLATES, 40)

    a_docs += cycled(PIPELINE_TEMPLATES, 30)
    b_docs += cycled(PIPELINE_TEMPLATES, 120)

    a_docs += cycled(FESTIVAL_SCAFFOLDS, 60, slots=FESTIVAL_POSITIVE)
    b_docs += cycled(FESTIVAL_SCAFFOLDS, 60, slots=FESTIVAL_NEGATIVE)

    a_docs += cycled(BORDERLINE_TEMPLATES, 21)
    b_docs += cycled(BORDERLINE_TEMPLATES, 20)

    a_docs += cycled(QUASAR_TEMPLATES, 3)

    a_docs += cycled(BALLOT_TEMPLATES, 200)
    b_docs += cycled(BALLOT_TEMPLATES, 180)

    for side in (a_docs, b_docs):
        side += cycled(ECONOMY_TAX_TEMPLATES, 15)
        side += cycled(ECONOMY_WX_TEMPLATES, 15)

    b_docs += cycled(MEADOW_TEMPLATES, 44)

    fill_needed_a = 2000 - len(a_docs)
    fill_needed_b = 2000 - len(b_docs)
    assert fill_needed_a == fill_needed_b, (fill_needed_a, fill_needed_b)
    for i in range(fill_needed_a):
        template = FILLER_TEMPLATES[i % len(FILLER_TEMPLATES)]
        noun_a = FILLER_NOUNS[rng.randrange(len(FILLER_NOUNS))]
        noun_b = FILLER_NOUNS[rng.randrange(len(FILLER_NOUNS))]
        while noun_b == noun_a:
            noun_b = FILLER_NOUNS[rng.randrange(len(FILLER_NOUNS))]
        text = template.format(a=noun_a, b=noun_b)
        a_docs.append(text)
        b_docs.append(text)

    records = [(LABEL_A, text) for text in a_docs] + [(LABEL_B, text) for text in b_docs]
    rng.shuffle(records)
    counters = {LABEL_A: 0, LABEL_B: 0}
    rows = []
    for community, text in records:
        counters[community] += 1
        rows.append(
            {"id": f"{community}-{counters[community]:04d}", "text": text, "community": community}
        )
    return rows


def contiguous_count(docs_tokens, phrase):
    needle = tuple(phrase.split(" "))
    n = len(needle)
    count = 0
    for toks in docs_tokens:
        for i in range(len(toks) - n + 1):
            if toks[i : i + n] == needle:
                count += 1
                break
    return count


def verify(rows):
    lexicon = load_lexicon(bundled_lexicon_path())

    # no community identifiers anywhere in the text
    for row in rows:
        lowered = row["text"].lower()
        for name in FORBIDDEN:
            assert name not in lowered, (name, row)

    # scaffold tokens of neutral planted groups must not carry valence
    neutral_templates = (
        MOONSHOT_TEMPLATES + PIPELINE_TEMPLATES + BORDERLINE_TEMPLATES
        + QUASAR_TEMPLATES + BALLOT_TEMPLATES + MEADOW_TEMPLATES
        + ECONOMY_TAX_TEMPLATES + ECONOMY_WX_TEMPLATES
        + [t.format(v="") for t in FESTIVAL_SCAFFOLDS]
    )
    for template in neutral_templates:
        for tok in tokenize(normalize(template)):
            assert tok not in lexicon.entries, f"scaffold token {tok!r} carries valence"
    for word in FESTIVAL_POSITIVE:
        assert lexicon.entries.get(word, 0) > 0, f"{word!r} missing from lexicon"
    for word in FESTIVAL_NEGATIVE:
        assert lexicon.entries.get(word, 0) < 0, f"{word!r} missing from lexicon"

    by_side = {LABEL_A: [], LABEL_B: []}
    for row in rows:
        by_side[row["community"]].append(tuple(tokenize(normalize(row["text"]))))
    assert len(by_side[LABEL_A]) == 2000 and len(by_side[LABEL_B]) == 2000

    expected = {
        "moonshot": (150, 40),
        "pipeline reform": (30, 120),
        "pipeline": (30, 120),
        "reform": (30, 120),
        "festival": (60, 60),
        "borderline": (21, 20),
        "quasar": (3, 0),
        "ballot": (200, 180),
        "economy": (30, 30),
        "meadow": (0, 44),
    }
    for phrase, (want_a, want_b) in expected.items():
        got = (
            contiguous_count(by_side[LABEL_A], phrase),
            contiguous_count(by_side[LABEL_B], phrase),
        )
        assert got == (want_a, want_b), (phrase, got, (want_a, want_b))

    lines = [json.dumps(row, ensure_ascii=False) for row in rows]
    corpus = ingest(lines, labels=(LABEL_A, LABEL_B))
    index = build_index(corpus, 3, lexicon)
    selected = [t.term for t in curate(index, CurationConfig())]
    assert set(selected) == PLANTED, f"curation selected {selected}"

    payload = build_scatter(index, "economy", seed=1234, cap=50, params=ClusterParams())
    kinds = Counter(payload.label)
    n_clusters = len([k for k in kinds if k != -1])
    assert n_clusters == 2, f"expected 2 clusters, got {dict(kinds)}"
    assert kinds.get(-1, 0) == 0, f"expected no noise points, got {dict(kinds)}"
    print(f"scatter check: clusters={n_clusters}, sizes={dict(kinds)}")
    print(f"curation check: selected={sorted(selected)}")
    print(f"distinct terms indexed: {index.term_count()}")


def main():
    rows = build_docs()
    verify(rows)
    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT_PATH, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False))
            fh.write("\n")
    print(f"wrote {len(rows)} records -> {OUT_PATH}")


if __name__ == "__main__":
    main()
