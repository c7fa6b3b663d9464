"""Deterministic random FPQL queries.

`sample_query(seed, index)` builds a document whose `query` selects origins
with a random boolean combination of predicate fragments. Fragment
`index % len(FRAGMENTS)` is always included, so any run of
`len(FRAGMENTS)` consecutive indices exercises every fragment, and the
fragments together use every expression kind, every iterator and both
user-defined operations of the document.

Fragments only apply ordering, arithmetic and Boolean operators to values
that cannot be null in a valid archive: collection elements are never
null, nullable navigations (`parent`, casts, `getRevision()`) are either
compared with `=`/`<>` against null first or folded into collections.
"""

from __future__ import annotations

from collections.abc import Callable

from pvdb.simulation.rng import CounterRng

DEFAULT_TIME_RANGE = (1_400_000_000, 1_700_000_000)

BRANCH_NAMES = ("refs/heads/main", "refs/heads/master", "refs/heads/dev", "refs/tags/v1")
FILE_NAMES = ("AndroidManifest.xml", "README", "main.py", "setup.cfg")
HOST_PREFIXES = ("https://github.com/", "https://gitlab.com/", "https://codeberg.org/")
AUTHOR_NAMES = ("Alice <alice@example.org>", "Bob <bob@example.org>", "Mallory <m@example.org>")
ORDERING = ("<", "<=", ">", ">=")

# Head revisions of the last snapshot; getRevision() nulls are dropped by collect
HEADS = "o.getLastSnapshot().branches->collect(b | b.getRevision())"

PRELUDE = """\
context Revision
def : rootOf() : Revision =
    if parent = null then self else parent.rootOf() endif
context Origin
def : hasBranch(n : String) : Boolean =
    getLastSnapshot().branches->exists(name = n)
"""

type Fragment = Callable[[CounterRng, tuple[int, int]], str]


def _url(rng: CounterRng, _: tuple[int, int]) -> str:
    prefix = rng.choice(HOST_PREFIXES)
    return f"o.url {rng.choice(ORDERING)} '{prefix}' or o.url = '{prefix}nowhere'"


def _branch_exists(rng: CounterRng, _: tuple[int, int]) -> str:
    first, second = rng.choice(BRANCH_NAMES), rng.choice(BRANCH_NAMES)
    return f"o.getLastSnapshot().branches->exists(b | b.name = '{first}' or b.name = '{second}')"


def _implicit_branch(rng: CounterRng, _: tuple[int, int]) -> str:
    return f"o.getLastSnapshot().branches->exists(name <> '{rng.choice(BRANCH_NAMES)}')"


def _user_predicate(rng: CounterRng, _: tuple[int, int]) -> str:
    return f"o.hasBranch('{rng.choice(BRANCH_NAMES)}')"


def _recent_visits(rng: CounterRng, times: tuple[int, int]) -> str:
    window = rng.integer(0, (times[1] - times[0]) // 2)
    return f"o.visits->select(v | v.timestamp > self.timestamp - {window})->notEmpty()"


def _visit_count(rng: CounterRng, _: tuple[int, int]) -> str:
    return f"-{rng.integer(0, 3)} + o.visits->size() {rng.choice(ORDERING)} {rng.integer(0, 4)}"


def _history_size(rng: CounterRng, _: tuple[int, int]) -> str:
    body = rng.choice(("parent", "p | p.parents"))
    return f"{HEADS}->exists(r | r->closure({body})->size() {rng.choice(ORDERING)} {rng.integer(1, 60)})"


def _root_age(rng: CounterRng, times: tuple[int, int]) -> str:
    moment = rng.integer(times[0], times[1])
    quantifier = rng.choice(("exists", "forAll"))
    return f"{HEADS}->{quantifier}(r | r.rootOf().commiterTimestamp {rng.choice(ORDERING)} {moment})"


def _file_present(rng: CounterRng, _: tuple[int, int]) -> str:
    return (
        f"{HEADS}->exists(r | r.tree.entries->closure(e : DirectoryEntry | "
        "if e.child.oclIsKindOf(Directory) "
        "then e.child.oclAsType(Directory).entries.oclAsSet() "
        "else e.oclAsSet() endif)"
        f"->exists(f | f.name = '{rng.choice(FILE_NAMES)}'))"
    )


def _large_file(rng: CounterRng, _: tuple[int, int]) -> str:
    return (
        f"{HEADS}->exists(r | r.tree.entries->exists(e | e.child.asType(Content) <> null "
        f"and e.child.asType(Content).length > {rng.integer(0, 200)}))"
    )


def _snapshots(rng: CounterRng, _: tuple[int, int]) -> str:
    return f"o.visits->collect(v | v.snapshot)->asSet()->size() <= {rng.integer(1, 4)}"


def _late_visits(rng: CounterRng, times: tuple[int, int]) -> str:
    moment = rng.integer(times[0], times[1])
    flag = rng.choice(("true", "false"))
    return f"o.visits->reject(v | v.timestamp < {moment})->isEmpty() = {flag}"


def _authors(rng: CounterRng, _: tuple[int, int]) -> str:
    op = rng.choice(("includes", "excludes"))
    return f"{HEADS}->collect(r | r.author)->{op}('{rng.choice(AUTHOR_NAMES)}')"


def _merges(rng: CounterRng, _: tuple[int, int]) -> str:
    return (
        f"{HEADS}->exists(r | r->closure(parent)->exists(c | c.parents->size() > 1)) or "
        f"{HEADS}->forAll(r | r.parent <> null and r.parent.authorTimestamp <= r.authorTimestamp)"
    )


def _releases(rng: CounterRng, _: tuple[int, int]) -> str:
    tag = f"v{rng.integer(0, 3)}"
    return (
        "o.getLastSnapshot().branches->exists(b | b.target.isKindOf(Release) and "
        f"b.target.asType(Release).name = '{tag}' and not (b.target.swhid = ''))"
    )


def _fixpoint(rng: CounterRng, _: tuple[int, int]) -> str:
    # bodies that map their last element onto itself
    if rng.random() < 0.5:
        bound = rng.integer(0, 5)
        walk = f"o.visits->size()->closure(n | if n < {bound} then n + 1 else {bound} endif)"
    else:
        walk = f"{HEADS}->collect(r | r->closure(c | if c.parent = null then c else c.parent endif))"
    return f"{walk}->size() {rng.choice(ORDERING)} {rng.integer(0, 8)}"


FRAGMENTS: tuple[Fragment, ...] = (
    _url,
    _branch_exists,
    _implicit_branch,
    _user_predicate,
    _recent_visits,
    _visit_count,
    _history_size,
    _root_age,
    _file_present,
    _large_file,
    _snapshots,
    _late_visits,
    _authors,
    _merges,
    _releases,
    _fixpoint,
)


def _combine(rng: CounterRng, parts: list[str]) -> str:
    text = f"({parts[0]})"
    for part in parts[1:]:
        connective = rng.choice(("and", "and", "or"))
        text = f"{text} {connective} ({part})"
    match rng.integer(0, 5):
        case 0:
            return f"not ({text})"
        case 1:
            return f"if {text} then true else o.url = '' endif"
    return text


def sample_predicate(
    seed: int, index: int, *, time_range: tuple[int, int] = DEFAULT_TIME_RANGE
) -> str:
    """Boolean FPQL expression over the origin variable `o`."""
    rng = CounterRng(seed, "query", index)
    fragments = [FRAGMENTS[index % len(FRAGMENTS)]]
    fragments += [rng.choice(FRAGMENTS) for _ in range(rng.integer(0, 2))]
    return _combine(rng, [fragment(rng, time_range) for fragment in fragments])


def sample_query(
    seed: int, index: int, *, time_range: tuple[int, int] = DEFAULT_TIME_RANGE
) -> str:
    """Complete query document; the same (seed, index) always gives the same text."""
    predicate = sample_predicate(seed, index, time_range=time_range)
    return (
        "context Graph\n"
        f"def : query() : Set(Origin) =\n    origins->select(o | {predicate})\n"
        f"{PRELUDE}"
    )
