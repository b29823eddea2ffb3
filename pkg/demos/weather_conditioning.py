"""Price statistics by flow strength and persistent weather type.

Uses the bundled fixture, where strong westerly flow brings wind and lowers
prices. Prices are grouped into flow-strength deciles, westerly and
anticyclonic runs of at least 12 h are pooled, and a merit-order line is
fitted against the residual load.
"""
from spotstat.cli.ingest import ingest_prices, ingest_residual_load, ingest_weather
from spotstat.synthetic import FIXTURE_DIR
from spotstat.emd import detrend
from spotstat.weather import align, condition_on_f, cwt_segments, merit_order_fit

price = ingest_prices(FIXTURE_DIR / "prices.csv")
weather = ingest_weather(FIXTURE_DIR / "weather.csv")
load = ingest_residual_load(FIXTURE_DIR / "residual_load.csv")
det, _ = detrend(price, 3)
joined = align(price, weather)

print("flow-strength bins (detrended price):")
for s in condition_on_f(joined, det, price):
    m = s.moments
    print(f"  {s.label:22s} n={s.sample_count:4d}  mean={m.mean:+6.2f}  std={m.std:5.2f}  "
          f"negative={s.negative_count}  high={s.high_price_count}")

for label in ("W", "Anticyclonic"):
    segs, pooled = cwt_segments(joined, det, label, 12.0, raw=price)
    if pooled is None:
        print(f"{label}: no run of 12 h or more")
        continue
    print(f"{label}: {len(segs)} runs >= 12 h, pooled mean {pooled.moments.mean:+.2f}, "
          f"std {pooled.moments.std:.2f}")

fit = merit_order_fit(price, load)
print(f"merit order: price = {fit.intercept:.2f} + {fit.slope * 1000:.3f} EUR/MWh per GW residual load "
      f"(r = {fit.rvalue:.2f})")
