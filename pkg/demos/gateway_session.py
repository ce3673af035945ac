"""Drive the JSON gateway over HTTP, end to end.

Starts an in-process server on a free port, then walks the wire protocol:
POST /query, POST /click (including the stale-token conflict), GET
/metrics, POST /deconstruct, GET /snapshot.  This is the same surface the
browser console talks to.

Run:  python3 demos/gateway_session.py
"""

import json
import threading
import urllib.error
import urllib.request

import numpy as np

from evoindex.engine import EngineConfig
from evoindex.gateway import SearchGateway, make_server
from evoindex.selection import BetaPolicy


def call(base, path, payload=None):
    if payload is None:
        req = urllib.request.Request(base + path)
    else:
        req = urllib.request.Request(
            base + path,
            data=json.dumps(payload).encode(),
            headers={"Content-Type": "application/json"},
        )
    with urllib.request.urlopen(req) as resp:
        body = resp.read().decode()
    return json.loads(body) if body.startswith("{") else body


def main():
    gateway = SearchGateway(
        cfg=EngineConfig(m=6, beta_policy=BetaPolicy.fixed(0.5)),
        rng=np.random.default_rng(11),
        object_universe=30,
    )
    server = make_server(gateway, port=0)
    port = server.server_address[1]
    threading.Thread(target=server.serve_forever, daemon=True).start()
    base = f"http://127.0.0.1:{port}"
    print(f"gateway up at {base}")

    try:
        out = call(base, "/query", {"session": "demo", "terms": ["rose", "garden"]})
        print(f"\nPOST /query 'rose garden' -> token {out['token']}, "
              f"term ids {out['terms']}")
        for row in out["results"]:
            print(f"  rank {row['rank']}: object {row['object']:>3} "
                  f"({row['provenance']}, riv {row['riv']:.1f})")

        target = out["results"][0]["object"]
        clicked = call(base, "/click",
                       {"session": "demo", "token": out["token"], "object": target})
        print(f"\nPOST /click object {target} -> riv delta {clicked['total']:.1f}, "
              f"promoted: {clicked['promoted']}")

        # a second query invalidates the first token; clicking it is a 409
        out2 = call(base, "/query", {"session": "demo", "terms": ["rose"]})
        try:
            call(base, "/click",
                 {"session": "demo", "token": out["token"], "object": target})
        except urllib.error.HTTPError as exc:
            print(f"\nPOST /click with the stale token -> HTTP {exc.code} "
                  f"({json.loads(exc.read())['error']})")

        metrics = call(base, "/metrics")
        print(f"\nGET /metrics -> version {metrics['version']}, "
              f"{metrics['links']} links over {metrics['objects']} objects, "
              f"generator {metrics['generator_size']} / pool {metrics['pool_size']}, "
              f"total riv {metrics['total_riv']:.1f}")

        gone = call(base, "/deconstruct", {"object": target})
        print(f"\nPOST /deconstruct object {target} -> removed {gone['removed']} links")

        snapshot = call(base, "/snapshot")
        print(f"\nGET /snapshot -> {len(snapshot.splitlines())} lines, "
              f"header {snapshot.splitlines()[0]!r}")
        assert str(target) not in {line.split(',')[1] for line in snapshot.splitlines()[1:]}
    finally:
        server.shutdown()
        server.server_close()
    print("\nserver stopped")


if __name__ == "__main__":
    main()
