#!/usr/bin/env python3
"""Regenerates src/geo/continent_table.inc from pycountry + pycountry-convert.

Codes the converter does not cover are filled from FILL below.
"""
import pycountry
import pycountry_convert as pc

FILL = {"AQ": "AN", "TF": "AN", "EH": "AF", "PN": "OC", "SX": "NA",
        "TL": "AS", "UM": "OC", "VA": "EU"}

rows = []
for c in sorted(pycountry.countries, key=lambda c: c.alpha_2):
    code = c.alpha_2
    try:
        cont = pc.country_alpha2_to_continent_code(code)
    except KeyError:
        cont = FILL[code]
    rows.append((code, cont))

with open("src/geo/continent_table.inc", "w") as f:
    f.write("// Generated by scripts/gen_continents.py. ISO 3166-1 alpha-2 -> continent.\n")
    for code, cont in rows:
        f.write('{"%s", Continent::%s},\n' % (code, cont))
print(len(rows), "codes")
