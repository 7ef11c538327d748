"""Random valid ``.rts`` models for property and soundness tests."""

import random

from capsched import dsl
from capsched.analysis import utilization

PERIODS = (40, 50, 80, 100, 200, 400)


def _pattern(rng, periodic_only=False):
    if periodic_only:
        T = rng.choice(PERIODS)
        return f"periodic period={T}", T, T, 1
    kind = rng.choice(("periodic", "aperiodic", "sporadic"))
    if kind == "sporadic":
        T = rng.choice((200, 400))
        t = rng.choice([d for d in (10, 20, 25, 40, 50, 100) if d < T])
        n = rng.randint(1, min(4, T // t))
        J = rng.choice((0, 0, rng.randint(0, t // 2), rng.randint(0, 2 * t)))
        text = f"sporadic outer={T} inner={t} burst={n}"
    else:
        T = rng.choice(PERIODS)
        t, n = T, 1
        J = rng.choice((0, rng.randint(0, T // 3)))
        text = f"{kind} {'period' if kind == 'periodic' else 'min_interarrival'}={T}"
    if J:
        text += f" jitter={J}"
    return text, T, t, n


def random_model_text(rng, max_txns=4, max_jobs=8, periodic_only=False, one_job=False,
                      jitter=True, max_cost=12):
    n_txn = rng.randint(1, max_txns)
    jobs_left = max_jobs
    out = ['system "random"']
    counter = [0]

    def fresh(prefix):
        counter[0] += 1
        return f"{prefix}{counter[0]}"

    for ti in range(n_txn):
        remaining_txns = n_txn - ti - 1
        n_jobs = 1 if one_job else rng.randint(1, max(1, min(3, jobs_left - remaining_txns)))
        jobs_left -= n_jobs
        pat, T, _, _ = _pattern(rng, periodic_only)
        if not jitter:
            pat = pat.split(" jitter=")[0]
        ext = fresh("E")
        # actions: dict id -> dict(trigger, prio, subs=[[name, cost, emits, reply]])
        actions = []
        jobs = []
        for k in range(n_jobs):
            prio = rng.randint(1, 6)
            root = fresh("A")
            trig = ext if k == 0 else None
            subs = [[fresh("s"), rng.randint(0 if rng.random() < 0.1 else 1, max_cost), None, False]
                    for _ in range(rng.randint(1, 3))]
            members = [dict(id=root, trigger=trig, prio=prio, subs=subs)]
            actions.append(members[0])
            if rng.random() < 0.4:
                ev = fresh("E")
                callee_subs = [[fresh("s"), rng.randint(1, max_cost), None, False]
                               for _ in range(rng.randint(1, 2))]
                callee_subs[-1][3] = True
                callee = dict(id=fresh("A"), trigger=ev, prio=prio, subs=callee_subs)
                free = [s for s in subs if s[2] is None]
                rng.choice(free)[2] = ("call", ev)
                actions.append(callee)
                members.append(callee)
            if k > 0:
                parent = rng.choice(jobs)
                ev = fresh("E")
                members[0]["trigger"] = ev
                host = rng.choice(parent)
                free = [s for s in host["subs"] if s[2] is None and not s[3]]
                if free:
                    rng.choice(free)[2] = ("signal", ev)
                else:
                    new = [fresh("s"), rng.randint(0, max_cost), ("signal", ev), False]
                    if host["subs"] and host["subs"][-1][3]:
                        host["subs"].insert(len(host["subs"]) - 1, new)
                    else:
                        host["subs"].append(new)
            jobs.append(members)
        dl = rng.choice((T, T, 2 * T, T // 2))
        out.append(f"transaction T{ti + 1} {{")
        out.append(f"  external {ext} {pat}")
        for a in actions:
            out.append(f"  action {a['id']} trigger={a['trigger']} owner=C{a['id']} "
                       f"priority={a['prio']} deadline={dl} {{")
            for name, cost, emits, reply in a["subs"]:
                line = f"    sub {name} exec={cost}"
                if emits:
                    line += f" emits {emits[0]} {emits[1]}"
                if reply:
                    line += " reply"
                out.append(line)
            out.append("  }")
        out.append("}")
    return "\n".join(out) + "\n"


def random_model(seed, max_utilization=0.95, **kw):
    """A parsed random model whose long-run utilization stays below the cap."""
    rng = random.Random(seed)
    while True:
        m = dsl.parse(random_model_text(rng, **kw))
        if utilization(m) <= max_utilization:
            return m


def single_job_model(*jobs):
    """One single-job periodic transaction per ``(cost, priority, period, jitter)``."""
    lines = ['system "s"']
    for i, (c, p, T, J) in enumerate(jobs, 1):
        lines += [f"transaction T{i} {{",
                  f"  external E{i} periodic period={T} jitter={J}",
                  f"  action A{i} trigger=E{i} owner=C{i} priority={p} deadline={T} {{",
                  f"    sub s{i} exec={c}", "  }", "}"]
    return dsl.parse("\n".join(lines) + "\n")
