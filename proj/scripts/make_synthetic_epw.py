#!/usr/bin/env python3
"""Generate deterministic synthetic EPW weather years for the bundled cities.

Temperatures follow monthly climate normals with a diurnal cycle and AR(1)
day-to-day noise; irradiance comes from a clear-sky model attenuated by a
random daily cloud cover. Output is a valid 8760-row EPW file.
"""
import argparse
from pathlib import Path

import numpy as np

CITIES = {
    "leon": dict(name="Leon", lat=42.59, lon=-5.65, elev=916,
                 tmean=[3.2, 4.6, 7.4, 9.0, 12.8, 17.2, 20.2, 19.9, 16.6, 11.6, 6.7, 4.0],
                 swing=6.5, clear=0.62, seed=11),
    "madrid": dict(name="Madrid", lat=40.41, lon=-3.68, elev=667,
                   tmean=[6.3, 7.9, 11.2, 12.9, 16.7, 22.2, 25.6, 25.1, 20.9, 15.1, 9.9, 6.9],
                   swing=6.5, clear=0.66, seed=12),
    "sevilla": dict(name="Sevilla", lat=37.42, lon=-5.90, elev=31,
                    tmean=[10.9, 12.4, 15.5, 17.6, 21.2, 25.5, 28.5, 28.2, 25.4, 20.6, 15.4, 12.0],
                    swing=7.0, clear=0.72, seed=13),
}
DAYS = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]


def sun_altitude(lat, lon, tz, doy, clock_hour):
    b = 2 * np.pi * (doy - 81) / 364.0
    eot = 9.87 * np.sin(2 * b) - 7.53 * np.cos(b) - 1.5 * np.sin(b)
    solar_hour = clock_hour + (4 * (lon - 15 * tz) + eot) / 60.0
    decl = np.radians(23.45 * np.sin(2 * np.pi * (284 + doy) / 365.0))
    omega = np.radians(15 * (solar_hour - 12))
    phi = np.radians(lat)
    s = np.sin(phi) * np.sin(decl) + np.cos(phi) * np.cos(decl) * np.cos(omega)
    return np.arcsin(np.clip(s, -1, 1))


def generate(city):
    c = CITIES[city]
    rng = np.random.default_rng(c["seed"])
    month = np.repeat(np.arange(1, 13), np.array(DAYS) * 24)
    day = np.concatenate([np.repeat(np.arange(1, d + 1), 24) for d in DAYS])
    hour = np.tile(np.arange(1, 25), 365)
    doy = np.repeat(np.arange(1, 366), 24)

    # Smooth monthly normals to daily values, then add the diurnal cycle.
    mid = np.cumsum(DAYS) - np.array(DAYS) / 2.0
    tm = np.array(c["tmean"])
    daily_mean = np.interp(np.arange(1, 366), np.concatenate([[mid[-1] - 365], mid, [mid[0] + 365]]),
                           np.concatenate([[tm[-1]], tm, [tm[0]]]))
    noise = np.zeros(365)
    for d in range(1, 365):
        noise[d] = 0.75 * noise[d - 1] + rng.normal(0, 1.3)
    cloud = np.clip(rng.beta(1.2, 2.5, 365) * (1.4 - c["clear"]), 0, 0.95)
    t_day = daily_mean + noise - 2.0 * (cloud - cloud.mean())
    clock = hour - 0.5
    diurnal = c["swing"] * np.cos(2 * np.pi * (clock - 15) / 24.0)
    dry = np.repeat(t_day, 24) + diurnal * np.repeat(1 - 0.6 * cloud, 24)

    alt = sun_altitude(c["lat"], c["lon"], 1, doy, clock)
    up = alt > 0
    i0 = 1367 * (1 + 0.033 * np.cos(2 * np.pi * doy / 365.0))
    am = np.where(up, 1 / np.maximum(np.sin(alt), 0.05), 0)
    dni_clear = np.where(up, i0 * 0.7 ** (am ** 0.678), 0)
    cl = np.repeat(cloud, 24)
    dni = dni_clear * (1 - cl) ** 1.5
    dhi = np.where(up, (0.1 + 0.3 * cl) * i0 * np.sin(alt) * (1 - 0.5 * cl), 0)
    ghi = dni * np.sin(np.maximum(alt, 0)) + dhi
    return dict(c=c, month=month, day=day, hour=hour, dry=dry, ghi=ghi, dni=dni, dhi=dhi)


def write_epw(path, g):
    c = g["c"]
    lines = [
        f"LOCATION,{c['name']},-,ESP,Synthetic,000000,{c['lat']:.2f},{c['lon']:.2f},1.0,{c['elev']:.1f}",
        "DESIGN CONDITIONS,0",
        "TYPICAL/EXTREME PERIODS,0",
        "GROUND TEMPERATURES,0",
        "HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0",
        "COMMENTS 1,Synthetic year generated from monthly normals and a clear-sky model",
        "COMMENTS 2,Not measured data",
        "DATA PERIODS,1,1,Data,Sunday, 1/ 1,12/31",
    ]
    for i in range(8760):
        t = g["dry"][i]
        row = [1999, g["month"][i], g["day"][i], g["hour"][i], 60, "?9?9?9?9E0?9?9?9?9?9?9?9?9?9?9?9?9?9?9?9*9*9?9?9?9",
               f"{t:.1f}", f"{t - 6:.1f}", 60, 101325, 0, 0, 300,
               f"{g['ghi'][i]:.0f}", f"{g['dni'][i]:.0f}", f"{g['dhi'][i]:.0f}",
               0, 0, 0, 0, 180, 2.0, 5, 5, 10.0, 77777, 9, "999999999", 10, 0.1, 0, 88, 0.2, 0, 0]
        lines.append(",".join(str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "weather"))
    ap.add_argument("cities", nargs="*", default=list(CITIES))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for city in args.cities:
        g = generate(city)
        write_epw(out / f"{city}_synthetic.epw", g)
        print(f"{city}: mean {g['dry'].mean():.1f} C, GHI {g['ghi'].sum() / 1000:.0f} kWh/m2")


if __name__ == "__main__":
    main()
