#!/usr/bin/env python3
"""Regenerates the checked-in test fixtures. Output is deterministic.

    python3 tests/data/generate_fixtures.py

Writes:
  validation_corpus.jsonl  100 review responses with the flags each should get
  cc_fixture/              Claude Code transcript tree (3 sessions, 375 usage lines)
  cc_fixture_manifest.json expected totals for the transcript tree
  review_comments.txt      human review comments, one per line
"""

import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

HERE = Path(__file__).resolve().parent
rng = random.Random(20240611)

FILES = ["src/api/handlers.py", "src/db/models.py", "web/src/App.tsx", "cmd/server/main.go",
         "lib/billing/invoice.rb", "src/core/cache.rs", "include/net/socket.hpp", "tests/test_auth.py"]
BODIES = [
    "This query runs inside the loop; batch it.",
    "Missing error handling when the file cannot be opened.",
    "Consider extracting this block into a helper.",
    "The timeout is hard-coded; read it from config.",
    "This branch is never reached.",
    "Prefer a constant over the magic number 86400.",
    "Guard against an empty list before indexing.",
    "The lock is held across the network call.",
    "Close the response body to avoid leaking connections.",
    "Validate the user id before using it in the path.",
]
SEVERITIES = ["critical", "major", "minor", "info"]
SUMMARIES = [
    "Solid change overall with a few correctness issues.",
    "The refactor is reasonable but error handling regressed.",
    "Small, focused diff. Two minor suggestions.",
    "Mostly fine; see comments on resource cleanup.",
    "Needs tests for the new branch before merging.",
]

PREAMBLES = [
    "Sure! Here is my review of the diff:",
    "Here's the review you asked for.",
    "Here’s my assessment of the changes:",
    "Here are my findings.",
    "Certainly. Below is the structured review.",
    "Of course! Reviewing now.",
    "I'll go through the changes file by file.",
    "I will summarize the issues I found.",
    "OK, here is the JSON:",
    "Okay. Review follows.",
    "sure thing, review below",
]
POSTAMBLES = [
    "Note: line numbers refer to the new file.",
    "**Note:** I did not run the tests.",
    "Let me know if you have questions, and feel free to ask for more detail.",
    "Hope this helps!",
    "I hope that helps with the merge.",
]


def payload(n_comments=None, long_body=False):
    n = rng.randint(0, 6) if n_comments is None else n_comments
    comments = []
    for _ in range(n):
        c = {"file": rng.choice(FILES), "body": rng.choice(BODIES), "severity": rng.choice(SEVERITIES)}
        if rng.random() < 0.8:
            c["line"] = rng.randint(1, 400)
        comments.append(c)
    if long_body:
        if not comments:
            comments.append({"file": rng.choice(FILES), "line": 12, "severity": "major", "body": ""})
        comments[0]["body"] = ("The retry loop never backs off. " * 90).strip()  # > 2000 chars
    return {"summary": rng.choice(SUMMARIES), "comments": comments}


def dump(p):
    return json.dumps(p, indent=2 if rng.random() < 0.5 else None, ensure_ascii=False)


def fenced(p):
    info = rng.choice(["json", "", "JSON"])
    return f"```{info}\n{dump(p)}\n```"


def build_case(pre, fence, post, trunc):
    body = fenced(payload(long_body=trunc)) if fence else dump(payload(long_body=trunc))
    text = body
    if pre:
        text = rng.choice(PREAMBLES) + rng.choice(["\n\n", "\n", " "]) + text
    if post:
        text = text + rng.choice(["\n\n", "\n"]) + rng.choice(POSTAMBLES)
    flags = []
    if pre:
        flags.append("preamble_stripped")
    if post:
        flags.append("postamble_stripped")
    if fence:
        flags.append("json_extracted_from_fence")
    if trunc:
        flags.append("comment_truncated")
    return text, sorted(flags)


def validation_corpus():
    plan = ([(False, False, False, False)] * 71 +
            [(True, True, True, False)] * 3 +
            [(True, True, False, False)] * 6 +
            [(True, False, True, False)] * 3 +
            [(False, True, False, True)] * 2 +
            [(True, False, False, False)] * 6 +
            [(False, False, True, False)] * 3 +
            [(False, True, False, False)] * 3 +
            [(False, False, False, True)] * 1)
    cases = [build_case(*p) for p in plan]
    cases.append(('{"summary": "Looks good overall", "comments": [{"file": "a.py", "body": "nit"', ["parse_failed"]))
    cases.append(('{"comments": [{"file": "b.go", "line": 3, "body": "unchecked error"}]}', ["parse_failed"]))
    assert len(cases) == 100
    rng.shuffle(cases)
    with open(HERE / "validation_corpus.jsonl", "w", encoding="utf-8") as out:
        for i, (text, flags) in enumerate(cases, 1):
            out.write(json.dumps({"id": f"r{i:03d}", "response": text, "expected_flags": flags},
                                 ensure_ascii=False) + "\n")


def partition(total, parts):
    """`parts` positive integers summing to `total`."""
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    bounds = [0] + cuts + [total]
    return [b - a for a, b in zip(bounds, bounds[1:])]


def usd(micros):
    return float(f"{micros / 1_000_000:.6f}")


def transcript_tree():
    root = HERE / "cc_fixture"
    sessions = [
        ("alpha-service/3f1c2a90-session.jsonl", 150, 10),
        ("alpha-service/8b7e55d1-session.jsonl", 120, 8),
        ("beta-cli/c04d9e12-session.jsonl", 82, 5),
    ]
    sonnet_costs = partition(14_440_000, 352)
    haiku_costs = partition(360_000, 23)
    start = datetime(2026, 2, 2, 9, 0, tzinfo=timezone.utc)
    manifest = {"usage_lines": 0, "input_tokens": 0, "output_tokens": 0,
                "cache_read_tokens": 0, "cache_creation_tokens": 0, "models": {}}
    clock = start
    uid = 0
    for rel, n_sonnet, n_haiku in sessions:
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        kinds = ["claude-sonnet-4-5-20250929"] * n_sonnet + ["claude-haiku-4-5-20251001"] * n_haiku
        rng.shuffle(kinds)
        lines = [json.dumps({"type": "summary", "summary": "Session summary", "leafUuid": f"leaf-{rel}"})]
        for model in kinds:
            clock += timedelta(minutes=rng.randint(20, 95))
            uid += 1
            lines.append(json.dumps({"type": "user", "uuid": f"u-{uid:05d}", "timestamp": clock.isoformat(),
                                     "message": {"role": "user", "content": "continue"}}))
            cost = sonnet_costs.pop() if "sonnet" in model else haiku_costs.pop()
            usage = {"input_tokens": rng.randint(3, 4000), "output_tokens": rng.randint(20, 3500),
                     "cache_read_input_tokens": rng.choice([0, rng.randint(1000, 60000)]),
                     "cache_creation_input_tokens": rng.choice([0, 0, rng.randint(100, 9000)])}
            uid += 1
            ts = (clock + timedelta(seconds=rng.randint(2, 40))).isoformat().replace("+00:00", "Z")
            lines.append(json.dumps({"type": "assistant", "uuid": f"a-{uid:05d}", "timestamp": ts,
                                     "sessionId": rel.split("/")[1].split("-")[0], "costUSD": usd(cost),
                                     "message": {"id": f"msg_{uid:05d}", "role": "assistant", "model": model,
                                                 "usage": usage,
                                                 "content": [{"type": "text", "text": "done"}]}}))
            manifest["usage_lines"] += 1
            manifest["input_tokens"] += usage["input_tokens"]
            manifest["output_tokens"] += usage["output_tokens"]
            manifest["cache_read_tokens"] += usage["cache_read_input_tokens"]
            manifest["cache_creation_tokens"] += usage["cache_creation_input_tokens"]
            m = manifest["models"].setdefault(model, {"events": 0, "cost_micros": 0})
            m["events"] += 1
            m["cost_micros"] += cost
        lines.insert(len(lines) // 2, "")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    assert not sonnet_costs and not haiku_costs
    (HERE / "cc_fixture_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


COMMENTS = [
    "possible null dereference here",
    "rename this variable for clarity",
    "This concatenates user input into SQL, which is an injection risk.",
    "Don't log the API secret.",
    "Off-by-one: the loop should stop at len - 1.",
    "There's a race condition between the check and the write.",
    "This crashes when the list is empty.",
    "Edge case: what happens with a negative amount?",
    "This is quadratic in the number of rows.",
    "Hot path allocation on every request; hoist it.",
    "Could we cache the parsed config?",
    "Please add a test for the failure branch.",
    "Coverage dropped on this module.",
    "The mock hides the real behaviour here.",
    "The name `tmp2` says nothing about what it holds.",
    "Use snake_case for consistency with the rest of the module.",
    "Please document the return value.",
    "Update the README with the new flag.",
    "This docstring is out of date.",
    "This class mixes parsing and persistence; consider a refactor.",
    "Duplicated logic with billing/invoice.py.",
    "The abstraction leaks the HTTP client into the domain layer.",
    "Formatting is off; run the formatter.",
    "Trailing whitespace.",
    "Indentation is inconsistent in this block.",
    "nit: extra blank line",
    "typo in the log message",
    "Not a blocker, but the early return reads better.",
    "LGTM",
    "Thanks, looks good to me.",
    "Why is this needed?",
    "Can we ship this behind a flag?",
    "Should this be async?",
    "The authorization check is missing on this endpoint.",
    "Sanitize the filename before writing to disk.",
    "Memory leak: the buffer is never freed.",
    "Deadlock risk when both locks are taken in reverse order.",
    "Unhandled promise rejection here.",
    "This makes an N+1 query per order.",
    "Slow for large inputs.",
    "Add an assertion for the invariant.",
    "Flaky test: depends on wall-clock time.",
    "Rename `doIt` to something descriptive.",
    "Identifier shadows the builtin.",
    "Comment contradicts the code below.",
    "Add a changelog entry.",
    "Tight coupling between the scheduler and the UI.",
    "Separation of concerns: move validation out of the controller.",
    "Readability suffers with this nested ternary.",
    "Lint will complain about the unused import.",
    "nit: prefer const",
    "Spelling: recieve -> receive",
    "Interesting approach.",
    "Let's discuss offline.",
    "XSS: the title is rendered unescaped.",
    "Possible overflow when multiplying the counts.",
    "Use-after-free if the callback fires late.",
    "Latency budget for this call is 50 ms.",
    "Missing tests for the parser.",
    "Line length exceeds the limit.",
]


def review_comments():
    (HERE / "review_comments.txt").write_text("\n".join(COMMENTS) + "\n", encoding="utf-8")


if __name__ == "__main__":
    validation_corpus()
    transcript_tree()
    review_comments()
