import crystfib

atlas = crystfib.Atlas()
assert len(atlas.ids(2)) == 17 and len(atlas.ids(3)) == 219, atlas

pg = atlas.get("2/4")
assert (pg.dim, pg.order, pg.betti()) == (2, 2, 1)
assert pg.classify() == "xx"
assert pg.torus_bundle() == ("O", "O")

rows = atlas.get("3/16").fibrations()
assert len(rows) == 1
row = rows[0]
assert (row["cofiber"], row["base"], row["seifert_split"], row["index"]) == ("2222", "I", True, 2)

assert atlas.get("3/78").fibrations() == atlas.get("3/76").fibrations()
assert not atlas.get("3/230").is_reducible()
assert atlas.get("3/230").fibrations() == []

cm = crystfib.Group.from_ops(2, ["y,x"], "cm")
assert cm.classify() == "*x" and cm.center_span() == atlas.get("2/5").center_span()

assert crystfib.normalize_symop("y + 1/2 , -x", 2) == "y+1/2,-x"
try:
    atlas.get("3/231")
except KeyError:
    pass
else:
    raise AssertionError("3/231 should be unknown")

passed, report = atlas.verify("2d")
assert passed, report

print("smoke test passed:", atlas)
