import threading

import numpy as np
import pytest
import requests

from evoindex.engine import EngineConfig
from evoindex.gateway import GatewayError, SearchGateway, TermDictionary, make_server
from evoindex.selection import BetaPolicy
from evoindex.store import IndexStore
from evoindex.usersim import GroundTruth


def make_gateway(seed=0, objects=30, m=6, truth=None, init_links=None):
    return SearchGateway(
        cfg=EngineConfig(m=m, beta_policy=BetaPolicy.fixed(0.5)),
        rng=np.random.default_rng(seed),
        truth=truth,
        object_universe=objects,
        init_links=init_links,
    )


@pytest.fixture()
def live():
    gateway = make_gateway()
    server = make_server(gateway, 0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    port = server.server_address[1]
    try:
        yield gateway, f"http://127.0.0.1:{port}"
    finally:
        server.shutdown()
        server.server_close()


# ---------------------------------------------------------------- direct API


def test_term_dictionary_persists(tmp_path):
    path = tmp_path / "terms.json"
    d = TermDictionary(path)
    assert d.intern("cat") == (0, True)
    assert d.intern("dog") == (1, True)
    assert d.intern("cat") == (0, False)
    assert "cat" in d and len(d) == 2
    reloaded = TermDictionary(path)
    assert reloaded.lookup("dog") == 1
    assert reloaded.intern("bird") == (2, True)


def test_query_interns_terms_and_links_objects():
    gw = make_gateway()
    out = gw.handle_query("s1", ["sunset", "beach"])
    assert out["version"] == 1
    assert out["terms"] == [0, 1]
    assert out["token"] == "p1"
    results = out["results"]
    assert len(results) == 6
    assert [r["rank"] for r in results] == list(range(1, 7))
    assert {r["provenance"] for r in results} <= {"exploit", "explore"}
    # fresh terms were linked to a sample of the universe at r_init
    assert gw.store.link_count > 0
    # a second query reuses the interned ids
    again = gw.handle_query("s1", ["beach"])
    assert again["terms"] == [1]
    assert again["token"] == "p2"


def test_query_validation():
    gw = make_gateway()
    with pytest.raises(GatewayError) as err:
        gw.handle_query("s", [])
    assert err.value.status == 400
    with pytest.raises(GatewayError):
        gw.handle_query("s", ["", "x"])
    with pytest.raises(GatewayError):
        gw.handle_query("s", ["x", "x"])


def test_click_reinforces_each_query_term():
    gw = make_gateway()
    out = gw.handle_query("s1", ["a", "b"])
    target = out["results"][0]["object"]
    before = gw.store.total_riv
    clicked = gw.handle_click("s1", out["token"], target)
    # one reinforcement per query term at weight*base = 1.0 each; both
    # pairs already exist (the query linked them), so no creation mass
    delta = gw.store.total_riv - before
    assert clicked["total"] == pytest.approx(delta)
    assert clicked["version"] == out["version"] + 1
    riv_a = gw.store.riv(0, target)
    riv_b = gw.store.riv(1, target)
    assert riv_a is not None and riv_b is not None


def test_click_reports_promotion_with_term_string():
    gw = make_gateway(m=3, objects=3)
    out = gw.handle_query("s", ["rose"])
    target = out["results"][0]["object"]
    # push the pair one step below the threshold, then click it over
    while gw.store.riv(0, target) < gw.store.threshold - 1.0:
        gw.store.reinforce(0, target, 1.0)
    out = gw.handle_query("s", ["rose"])
    assert any(r["object"] == target for r in out["results"])
    clicked = gw.handle_click("s", out["token"], target)
    assert clicked["promoted"] == [{"term_id": 0, "term": "rose", "object": target}]
    assert gw.store.explored_count == 1


def test_stale_token_is_conflict_and_mutates_nothing():
    gw = make_gateway()
    first = gw.handle_query("s1", ["a"])
    second = gw.handle_query("s1", ["a"])
    state = gw.store.to_text()
    version = gw.version
    with pytest.raises(GatewayError) as err:
        gw.handle_click("s1", first["token"], second["results"][0]["object"])
    assert err.value.status == 409
    assert gw.store.to_text() == state
    assert gw.version == version
    # the latest token still works
    gw.handle_click("s1", second["token"], second["results"][0]["object"])


def test_click_without_presentation_is_conflict():
    gw = make_gateway()
    with pytest.raises(GatewayError) as err:
        gw.handle_click("ghost", "p1", 0)
    assert err.value.status == 409


def test_click_on_unpresented_object_is_bad_request():
    gw = make_gateway()
    out = gw.handle_query("s", ["a"])
    absent = max(o["object"] for o in out["results"]) + 1000
    with pytest.raises(GatewayError) as err:
        gw.handle_click("s", out["token"], absent)
    assert err.value.status == 400
    with pytest.raises(GatewayError):
        gw.handle_click("s", out["token"], "zero")


def test_metrics_reports_counts_and_truth_p():
    truth = GroundTruth([(0, 0), (0, 1)])
    gw = make_gateway(truth=truth)
    metrics = gw.handle_metrics()
    assert metrics["links"] == 0
    assert metrics["p"] == 0.0
    gw.handle_query("s", ["x"])
    metrics = gw.handle_metrics()
    assert metrics["links"] == gw.store.link_count
    assert metrics["generator_size"] == gw.store.unexplored_count
    assert metrics["pool_size"] == gw.store.explored_count
    assert metrics["objects"] == gw.store.object_count
    assert metrics["total_riv"] == pytest.approx(gw.store.total_riv)
    assert "x" in metrics["top_objects"]
    top = metrics["top_objects"]["x"]
    assert len(top) <= 5
    rivs = [e["riv"] for e in top]
    assert rivs == sorted(rivs, reverse=True)
    # promote one truth pair and watch p move
    for _ in range(10):
        gw.store.reinforce(0, 0, 1.0)
    assert gw.handle_metrics()["p"] == 0.5


def test_deconstruct_removes_object_links():
    gw = make_gateway()
    gw.handle_query("s", ["a", "b"])
    obj = gw.store.objects_sorted()[0]
    links_before = gw.store.link_count
    out = gw.handle_deconstruct(obj)
    assert out["removed"] >= 1
    assert gw.store.link_count == links_before - out["removed"]
    assert not gw.store.has_object(obj)
    # removing a single pair by term string
    obj2 = gw.store.objects_sorted()[0]
    out = gw.handle_deconstruct(obj2, "a")
    assert out["removed"] in (0, 1)
    # unknown term string removes nothing
    assert gw.handle_deconstruct(obj2, "never-seen")["removed"] == 0
    with pytest.raises(GatewayError):
        gw.handle_deconstruct("x")


def test_version_is_monotone_across_mutations():
    gw = make_gateway()
    versions = [gw.handle_query("s", ["a"])["version"]]
    out = gw.handle_query("s", ["b"])
    versions.append(out["version"])
    versions.append(gw.handle_click("s", out["token"], out["results"][0]["object"])["version"])
    versions.append(gw.handle_deconstruct(gw.store.objects_sorted()[0])["version"])
    assert versions == sorted(versions)
    assert len(set(versions)) == len(versions)


def test_snapshot_text_round_trips_through_store():
    gw = make_gateway()
    out = gw.handle_query("s", ["a"])
    gw.handle_click("s", out["token"], out["results"][0]["object"])
    text = gw.snapshot_text()
    loaded = IndexStore.from_text(text)
    assert loaded.to_text() == gw.store.to_text()


def test_replay_log_rebuilds_exact_state():
    gw = make_gateway(seed=3)
    for i in range(20):
        out = gw.handle_query("s", [f"term{i % 4}"])
        if out["results"]:
            gw.handle_click("s", out["token"], out["results"][i % len(out["results"])]["object"])
        if i == 10:
            gw.handle_deconstruct(gw.store.objects_sorted()[0])
    rebuilt = gw.replay_log()
    assert rebuilt.to_text() == gw.store.to_text()


# ------------------------------------------------------------------- HTTP


def test_http_query_click_metrics_flow(live):
    gateway, base = live
    r = requests.post(base + "/query", json={"session": "s1", "terms": ["sea", "sun"]})
    assert r.status_code == 200
    assert r.headers["Access-Control-Allow-Origin"] == "*"
    body = r.json()
    assert body["token"] and body["results"]
    target = body["results"][0]["object"]

    before = requests.get(base + "/metrics").json()
    r = requests.post(
        base + "/click",
        json={"session": "s1", "token": body["token"], "object": target},
    )
    assert r.status_code == 200
    click = r.json()
    after = requests.get(base + "/metrics").json()
    # the metrics delta equals the reported reinforcement total
    assert after["total_riv"] - before["total_riv"] == pytest.approx(click["total"])
    assert after["version"] > before["version"]


def test_http_stale_token_409_and_no_mutation(live):
    gateway, base = live
    first = requests.post(base + "/query", json={"session": "s", "terms": ["a"]}).json()
    second = requests.post(base + "/query", json={"session": "s", "terms": ["a"]}).json()
    metrics = requests.get(base + "/metrics").json()
    r = requests.post(
        base + "/click",
        json={"session": "s", "token": first["token"], "object": second["results"][0]["object"]},
    )
    assert r.status_code == 409
    assert "error" in r.json()
    assert requests.get(base + "/metrics").json() == metrics


def test_http_snapshot_is_parseable(live):
    gateway, base = live
    requests.post(base + "/query", json={"session": "s", "terms": ["x"]})
    r = requests.get(base + "/snapshot")
    assert r.status_code == 200
    assert r.headers["Content-Type"] == "text/plain"
    loaded = IndexStore.from_text(r.text)
    assert loaded.link_count == gateway.store.link_count


def test_http_deconstruct(live):
    gateway, base = live
    requests.post(base + "/query", json={"session": "s", "terms": ["x"]})
    obj = gateway.store.objects_sorted()[0]
    r = requests.post(base + "/deconstruct", json={"object": obj})
    assert r.status_code == 200
    assert r.json()["removed"] >= 1


def test_http_error_paths(live):
    _, base = live
    assert requests.get(base + "/nope").status_code == 404
    assert requests.post(base + "/nope", json={}).status_code == 404
    r = requests.post(base + "/query", data=b"not json",
                      headers={"Content-Type": "application/json"})
    assert r.status_code == 400
    r = requests.post(base + "/query", json={"session": "s"})
    assert r.status_code == 400
    r = requests.post(base + "/query", json={"session": "", "terms": ["a"]})
    assert r.status_code == 400
    r = requests.post(base + "/click", json={"session": "s", "token": 5, "object": 1})
    assert r.status_code == 400


def test_http_options_preflight(live):
    _, base = live
    r = requests.options(base + "/query")
    assert r.status_code == 204
    assert r.headers["Access-Control-Allow-Origin"] == "*"
    assert "POST" in r.headers["Access-Control-Allow-Methods"]


def test_concurrent_sessions_serialize_and_replay(live):
    # hammer the gateway from several threads, then rebuild the store from
    # the mutation log; serialized application means the replay is exact
    gateway, base = live
    errors = []

    def worker(wid):
        try:
            with requests.Session() as http:
                for i in range(15):
                    out = http.post(
                        base + "/query",
                        json={"session": f"w{wid}", "terms": [f"t{(wid + i) % 5}"]},
                    ).json()
                    if not out["results"]:
                        continue
                    pick = out["results"][i % len(out["results"])]["object"]
                    r = http.post(
                        base + "/click",
                        json={"session": f"w{wid}", "token": out["token"], "object": pick},
                    )
                    if r.status_code not in (200, 409):
                        errors.append((wid, r.status_code, r.text))
        except Exception as exc:  # noqa: BLE001 - surfaced via the errors list
            errors.append((wid, exc))

    threads = [threading.Thread(target=worker, args=(w,)) for w in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert errors == []
    # every applied click bumped the version once (queries bump it too)
    clicks = sum(1 for e in gateway.mutation_log if e.kind == "click")
    assert clicks > 0
    assert gateway.version >= clicks
    rebuilt = gateway.replay_log()
    assert rebuilt.to_text() == gateway.store.to_text()
    assert rebuilt.total_riv == pytest.approx(gateway.store.recompute_total())
