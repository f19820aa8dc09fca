#!/usr/bin/env python3
"""Regenerates the bundled fixture models and datasets under data/.

Deterministic for a given seed. Needs numpy; the digits set also needs
scikit-learn (only for load_digits).
"""
import argparse
import json
import pathlib

import numpy as np

FORMAT_VERSION = 1
# Final-layer logit scale. A softer softmax keeps f smooth enough for the
# rational interpolant while leaving argmax untouched.
BLOBS_LOGIT_SCALE = 0.03


def softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def forward(weights, x):
    h = np.atleast_2d(np.asarray(x, dtype=np.float64))
    for layer in weights["layers"]:
        w = np.asarray(layer["weights"]).reshape(layer["rows"], layer["cols"])
        h = h @ w.T + np.asarray(layer["bias"])
        if layer["activation"] == "relu":
            h = np.maximum(h, 0.0)
        elif layer["activation"] == "softmax":
            h = softmax(h)
    return h


def layer(w, b, activation):
    return {
        "rows": int(w.shape[0]),
        "cols": int(w.shape[1]),
        "weights": [float(v) for v in w.reshape(-1)],
        "bias": [float(v) for v in b],
        "activation": activation,
    }


def blobs(seed):
    rng = np.random.default_rng(seed)
    classes, dim = 10, 16
    centers = rng.normal(0, 3, (classes, dim))

    def draw(n, s):
        r = np.random.default_rng(s)
        y = r.integers(0, classes, n)
        return centers[y] + r.normal(0, 2.5, (n, dim)), y

    x_train, y_train = draw(3000, seed + 1)
    x_test, y_test = draw(1000, seed + 2)

    hidden = 32
    w1 = rng.normal(0, np.sqrt(2 / dim), (hidden, dim))
    b1 = np.zeros(hidden)
    w2 = rng.normal(0, np.sqrt(1 / hidden), (classes, hidden))
    b2 = np.zeros(classes)
    lr = 0.1
    for _ in range(1500):
        h = np.maximum(x_train @ w1.T + b1, 0)
        p = softmax(h @ w2.T + b2)
        g = p.copy()
        g[np.arange(len(y_train)), y_train] -= 1
        g /= len(y_train)
        gw2, gb2 = g.T @ h, g.sum(0)
        gh = g @ w2
        gh[h <= 0] = 0
        gw1, gb1 = gh.T @ x_train, gh.sum(0)
        w1 -= lr * gw1
        b1 -= lr * gb1
        w2 -= lr * gw2
        b2 -= lr * gb2

    weights = {
        "format_version": FORMAT_VERSION,
        "input_dim": dim,
        "layers": [
            layer(w1, b1, "relu"),
            layer(w2 * BLOBS_LOGIT_SCALE, b2 * BLOBS_LOGIT_SCALE, "softmax"),
        ],
    }
    return weights, x_test, y_test


def digits(seed):
    from sklearn.datasets import load_digits

    data = load_digits()
    x = data.data / 16.0
    y = data.target
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(y))
    split = int(0.7 * len(y))
    tr, te = order[:split], order[split:]
    classes, dim = 10, x.shape[1]
    w = np.zeros((classes, dim))
    b = np.zeros(classes)
    for _ in range(2000):
        p = softmax(x[tr] @ w.T + b)
        g = p.copy()
        g[np.arange(len(tr)), y[tr]] -= 1
        g /= len(tr)
        w -= 0.5 * (g.T @ x[tr] + 1e-4 * w)
        b -= 0.5 * g.sum(0)
    weights = {"format_version": FORMAT_VERSION, "input_dim": dim, "layers": [layer(w, b, "softmax")]}
    return weights, x[te], y[te]


def write_csv(path, x, y):
    with open(path, "w") as out:
        out.write("label," + ",".join(f"x{i}" for i in range(x.shape[1])) + "\n")
        for row, label in zip(x, y):
            out.write(str(int(label)) + "," + ",".join(repr(float(v)) for v in row) + "\n")


def export(out_dir, name, weights, x_test, y_test, fixtures):
    weights_path = out_dir / f"{name}.json"
    weights_path.write_text(json.dumps(weights, separators=(",", ":")) + "\n")
    # Fixture outputs come from the serialized weights, not the in-memory ones.
    reloaded = json.loads(weights_path.read_text())
    accuracy = float((forward(reloaded, x_test).argmax(1) == y_test).mean())
    triples = [
        {"input": [float(v) for v in x_test[i]], "expected": [float(v) for v in forward(reloaded, x_test[i])[0]],
         "tolerance": 1e-6}
        for i in range(fixtures)
    ]
    (out_dir / f"{name}_fixtures.json").write_text(json.dumps({"triples": triples}, indent=1) + "\n")
    (out_dir / f"{name}_meta.json").write_text(
        json.dumps({"test_accuracy": accuracy, "test_rows": int(len(y_test))}, indent=1) + "\n")
    return accuracy


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--fixtures", type=int, default=24)
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    weights, x_test, y_test = blobs(args.seed)
    write_csv(out / "blobs_test.csv", x_test, y_test)
    print("blobs_mlp test accuracy", export(out, "blobs_mlp", weights, x_test, y_test, args.fixtures))

    weights, x_test, y_test = digits(args.seed)
    write_csv(out / "digits_test.csv", x_test, y_test)
    print("digits_logreg test accuracy", export(out, "digits_logreg", weights, x_test, y_test, args.fixtures))


if __name__ == "__main__":
    main()
