"""Seeded round trips on random graphs, honest and with one perturbed edge."""
from collections import Counter

from mlsrigid.generate import RunConfig, cmd_roundtrip

honest = cmd_roundtrip(RunConfig(seed=1, rank=5, min_rank=2, trials=30))
print("honest:", honest["passed"], "of", len(honest["trials"]), "certified")
for t in honest["trials"][:5]:
    print(f"  trial {t['trial']}: rank {t['rank']}, {t['certificate']} identities, "
          f"{t['queries']} queries, phi {t['phi']}")

# one hidden core edge moves by 1/7; the rebuilt core must not match the truth
bent = cmd_roundtrip(RunConfig(seed=1, rank=5, min_rank=2, trials=30, perturb=True))
print("perturbed:", Counter(t["verdict"] for t in bent["trials"]), "ok:", bent["ok"])
