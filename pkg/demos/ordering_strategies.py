"""Show how a result list is assembled and presented on a toy index.

A query's list has two blocks: the exploit block O_a (the |O_a| highest
cumulative-riv objects, |O_a| = floor(beta*M + 1/2)) and the explore block
O_b (a uniform sample of the rest).  Four strategies then decide the final
on-screen order.  This script prints one presentation per strategy and
then estimates the top-slot distribution of each over 20000 draws.

Run:  python3 demos/ordering_strategies.py
"""

from collections import Counter

import numpy as np

from evoindex.selection import (
    OrderingStrategy,
    choose_oa_size,
    compose_mq,
    construct_oa,
    order_mq,
)
from evoindex.store import IndexStore

TOY = """100000.0,1.0,1.0
0,1,1.0
0,2,2.0
0,3,3.0
0,4,4.0
0,5,0.5
0,6,0.0
"""


def main():
    store = IndexStore.from_text(TOY)
    terms = (0,)

    print("toy index under term 0 (object: riv):")
    for obj in store.objects_sorted():
        print(f"  {obj}: {store.riv(0, obj)}")

    m = 4
    for beta in (0.25, 0.5, 0.75):
        print(f"beta = {beta}: |O_a| = {choose_oa_size(beta, m)} of M = {m}")

    k = choose_oa_size(0.5, m)
    oa = construct_oa(store, terms, k)
    print(f"\nexploit block (top {k} by riv, ties to the smaller id): {oa}")

    rng = np.random.default_rng(42)
    explore = [o for o in store.objects_sorted() if o not in oa][: m - k]
    mq = compose_mq(oa, explore)
    print(f"composed list (a = exploit, b = explore): {mq!r}")

    print("\none presentation per strategy:")
    for strategy in OrderingStrategy:
        out = order_mq(mq, strategy, store, terms, rng)
        print(f"  {strategy.value:>18}: {out!r}")

    # top-slot frequencies over many draws; completely_random flattens the
    # distribution, partially_random follows the score shares, and the two
    # block-preserving strategies keep an exploit object on top
    n = 20_000
    print(f"\ntop-slot frequency over {n} draws:")
    for strategy in OrderingStrategy:
        counts = Counter()
        for _ in range(n):
            out = order_mq(mq, strategy, store, terms, rng)
            counts[out.objects[0]] += 1
        shares = ", ".join(f"{o}: {counts[o] / n:.3f}" for o in sorted(counts))
        print(f"  {strategy.value:>18}: {shares}")


if __name__ == "__main__":
    main()
