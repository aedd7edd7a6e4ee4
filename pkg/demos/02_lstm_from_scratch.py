"""Training the numpy LSTM scorer on a toy sequence task.

Sequences whose embedding component points in the positive direction are
labeled 1, negative direction 0. A few dozen full-batch Adam steps separate
them completely.
"""

import numpy as np

from propmatch.models import Adam, LSTMModel, lstm_grads, lstm_score

rng = np.random.default_rng(0)

sequences, labels = [], []
for i in range(20):
    label = i % 2
    base = 1.0 if label else -1.0
    steps = [np.concatenate([np.eye(9)[i % 9],
                             base + 0.1 * rng.normal(size=3)])
             for _ in range(rng.integers(1, 4))]
    sequences.append(steps)
    labels.append(float(label))

model = LSTMModel.init(input_dim=12, hidden_dim=4, seed=1)
opt = Adam(model.params(), lr=1e-2)

for epoch in range(40):
    total = 0.0
    grads = [np.zeros_like(p) for p in model.params()]
    for steps, label in zip(sequences, labels):
        loss, g = lstm_grads(model, steps, label)
        total += loss
        for acc, gi in zip(grads, g):
            acc += gi / len(sequences)
    opt.step(grads)
    print(f"epoch {epoch}: mean loss {total / len(sequences):.4f}")

correct = sum((lstm_score(s, model) > 0.5) == bool(l)
              for s, l in zip(sequences, labels))
print(f"training accuracy: {correct}/{len(sequences)}")
