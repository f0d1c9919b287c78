"""Replays GA audit trails and checks the run invariants at every cycle."""

from evotab.ga import ASSIGN_ZERO


def replay_ga(outcome, initial, table, policy=ASSIGN_ZERO, grid_size=216):
    """Rebuild the population cycle by cycle from ``outcome.audit``.

    ``initial`` is the list of initial Individuals. Asserts steady-state
    size, member uniqueness, the single-zero rule, offspring provenance,
    history uniqueness of additions, fitness faithfulness and the counter
    identities. Returns the final list of (chromosome, fitness) members.
    """
    members = [(m.chromosome, m.fitness) for m in initial]
    size = len(members)
    history = {c for c, _ in members}
    added = 0

    def check_population():
        assert len(members) == size
        chroms = [c for c, _ in members]
        assert len(set(chroms)) == len(chroms), "duplicate chromosome in population"
        for c, f in members:
            assert f == table.lookup(c), "member fitness disagrees with table"
        if policy == ASSIGN_ZERO:
            assert sum(1 for _, f in members if f == 0) <= 1, "two zero-fitness members"

    check_population()
    for event in outcome.audit:
        assert event["event"] == "breed"
        i1, i2 = event["parents"]
        assert i1 != i2
        p1, p2 = event["parent_chromosomes"]
        assert members[i1][0] == p1 and members[i2][0] == p2, "parents not taken from population"
        assert members[i1][1] >= members[i2][1] > 0
        k = event["crossover_point"]
        assert 1 <= k < len(p1)
        child = tuple(event["offspring"])
        for i, gene in enumerate(child):
            assert gene in (p1[i], p2[i]), "offspring gene not inherited"
        assert child == tuple(p1[:k]) + tuple(p2[k:])

        mut = event["mutation"]
        if mut and mut.get("applied"):
            m = mut["member"]
            old = members[m][0]
            new = old[: mut["gene"]] + (mut["new_value"],) + old[mut["gene"] + 1:]
            members[m] = (new, mut["fitness"])
        check_population()

        if event["outcome"] == "stop":
            assert mut["fitness"] >= max(f for _, f in members)
            assert event is outcome.audit[-1]
            continue
        if event["outcome"] == "add":
            assert child not in history, "chromosome added twice"
            fits = [f for _, f in members]
            weakest = fits.index(min(fits))
            assert event["replaced"] == weakest
            members[weakest] = (child, event["fitness"])
            history.add(child)
            added += 1
            check_population()
        else:
            assert event["outcome"] == "reject"
            if event["reason"] == "duplicate":
                assert child in history or child in [c for c, _ in members]
            else:
                history.add(child)

    assert added == outcome.additions
    assert outcome.result_value == outcome.additions + size
    assert outcome.additions <= grid_size
    if policy == ASSIGN_ZERO:
        assert len(history) - size == outcome.additions
    return members
