"""Smoke test for the compiled `hdx` module. Exits nonzero on the first mismatch."""

import json
import math

import hdx


def close(a, b, tol=1e-12):
    return all(abs(x - y) <= tol for x, y in zip(a, b)) and len(a) == len(b)


def main():
    mu = hdx.Complex.eta_correlated(0.2)
    assert mu.k == 2 and len(mu) == 4, mu
    assert abs(mu.certify() - 0.2) < 1e-12

    f = mu.function('{"kind": "dictator", "coord": 0, "value": 1}')
    assert close(f, [0.0, 0.0, 1.0, 1.0]), f
    parts = mu.decompose(f)
    assert close([sum(v) for v in zip(*parts.values())], f)
    assert close(parts[3], [0.1, -0.1, 0.1, -0.1]), parts[3]
    assert abs(mu.globalness(f, 1) - 1.0) < 1e-12
    assert close(mu.noise(f, 0.5), [0.225, 0.275, 0.725, 0.775])

    cube = hdx.Complex.product([2, 2])
    g = cube.function('{"kind": "dictator", "coord": 0, "value": 1}')
    assert abs(cube.stability(g, 0.5) - 5 / 16) < 1e-12
    rows = cube.influences(g, [0], 1)
    assert all(abs(i - 0.25) < 1e-12 for _, i, _ in rows), rows

    p = hdx.Complex.perturbed_product([3, 3, 3], 0.05, seed=1)
    assert abs(p.certify() - 0.020211454731120095) < 1e-12
    again = hdx.Complex.from_json(p.to_json())
    assert close(again.weights(), p.weights())
    h = p.function('{"kind": "random-boolean", "p": 0.3}', seed=4)
    assert p.norm2(p.updown(h)) <= p.norm2(h) + 1e-12
    assert math.isclose(p.expectation(p.low_degree(h, 0)), p.expectation(h), abs_tol=1e-12)

    lines = hdx.check("exact-identities").splitlines()
    header = json.loads(lines[0])
    records = [json.loads(x) for x in lines[1:]]
    assert header["records"] == len(records) > 0
    assert all(r["status"] != "FAIL" for r in records)
    assert len(hdx.catalog()) == 21

    try:
        mu.noise(f, 2.0)
    except ValueError:
        pass
    else:
        raise AssertionError("rho outside [0, 1] accepted")

    print(f"hdx {hdx.__version__}: smoke test passed ({len(records)} identity records)")


if __name__ == "__main__":
    main()
