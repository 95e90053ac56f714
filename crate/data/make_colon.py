"""Build data/colon.csv from the recurrence-free outcome of the R `survival::colon` data.

Draws a stratified sample of 191 patients (numpy PCG64, seed 1) with the
composition 65 events before 3 years, 22 censored before 3 years and 104 still
at risk at 3 years. Only 20 patients in the source data are censored before
3 years, so 2 sampled early events are re-labelled as censored at the same
time. Times are in years; follow-up is administratively censored at 3 years.

Requires the `rdatasets` Python package.
"""
import numpy as np
import rdatasets

Y_PLUS = 3.0

df = rdatasets.data("survival", "colon")
d = df[df.etype == 1].copy().sort_values("id").reset_index(drop=True)
d["years"] = d.time / 365.25

early_event = d[(d.status == 1) & (d.years < Y_PLUS)]
early_cens = d[(d.status == 0) & (d.years < Y_PLUS)]
at_risk = d[d.years >= Y_PLUS]

rng = np.random.Generator(np.random.PCG64(1))
ev_idx = rng.choice(len(early_event), size=65 + 2, replace=False)
adm_idx = rng.choice(len(at_risk), size=104, replace=False)

events = early_event.iloc[ev_idx[:65]]
relabelled = early_event.iloc[ev_idx[65:]]

rows = []
for _, r in events.iterrows():
    rows.append((r.years, 1, int(r.rx == "Lev+5FU")))
for frame in (early_cens, relabelled):
    for _, r in frame.iterrows():
        rows.append((r.years, 0, int(r.rx == "Lev+5FU")))
for _, r in at_risk.iloc[adm_idx].iterrows():
    rows.append((Y_PLUS, 0, int(r.rx == "Lev+5FU")))

rows.sort()
with open("colon.csv", "w") as f:
    f.write("time,event,lev5fu\n")
    for t, e, w in rows:
        f.write(f"{t:.6f},{e},{w}\n")
