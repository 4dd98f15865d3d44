import json

import numpy as np
import pytest

from colortrap.corpus_gen import (
    K100, KINDS, MAGENTA, PageRecipe, RecipeInvalid, default_recipes, generate, glyph_mask,
    load_recipes, text_graphic_recipes, uniform_heavy, write_corpus,
)
from colortrap.misreg_sim import BACKGROUND, CONTONE, load_region_map
from colortrap.raster_io import load_page
from colortrap.trapper import run_algorithm


@pytest.mark.parametrize("kind", KINDS)
def test_deterministic_and_consistent(kind):
    r = PageRecipe(kind, 128, 96, seed=11)
    p1, m1 = generate(r)
    p2, m2 = generate(r)
    assert p1 == p2 and m1 == m2
    assert p1.data.shape == (96, 128, 4)
    assert m1.consistent_with(p1)
    assert generate(PageRecipe(kind, 128, 96, seed=12))[0] != p1 or kind == "gradient"


@pytest.mark.parametrize("bad", [
    dict(kind="photo"), dict(kind="text", width=20), dict(kind="mixed", width=64, height=64),
    dict(kind="text", seed=-1), dict(kind="text", seed=2 ** 64), dict(kind="graphic", palette=((0, 0, 0, 0),)),
    dict(kind="graphic", palette=((0, 0, 300, 0),)), dict(kind="text", palette=((10, 10, 10, 10),)),
    dict(kind="graphic", objects=-1), dict(kind="text", width=100.5),
])
def test_recipe_validation(bad):
    with pytest.raises(RecipeInvalid):
        PageRecipe(**bad)


def test_recipe_dict_roundtrip():
    r = PageRecipe("graphic", 64, 80, ((0, 255, 255, 0),), 5, 3)
    assert PageRecipe.from_dict(json.loads(json.dumps(r.to_dict()))) == r
    with pytest.raises(RecipeInvalid):
        PageRecipe.from_dict({"kind": "text", "colour": 1})


def _four_adjacent_pairs(ids):
    pairs = set()
    for a, b in ((ids[:, :-1], ids[:, 1:]), (ids[:-1], ids[1:])):
        diff = a != b
        pairs |= set(zip(a[diff].tolist(), b[diff].tolist()))
    return {tuple(sorted(p)) for p in pairs}


def test_text_glyphs_sit_on_fills_only():
    page, rm = generate(PageRecipe("text", 256, 256, (MAGENTA,), seed=2))
    k_ids = {i for i, c in rm.palette.items() if c == K100}
    assert k_ids
    for a, b in _four_adjacent_pairs(rm.ids):
        if a in k_ids or b in k_ids:
            other = b if a in k_ids else a
            assert rm.palette[other] == MAGENTA


def test_glyph_masks():
    rng = np.random.default_rng(0)
    for _ in range(200):
        g = glyph_mask(rng)
        assert g.dtype == bool and g.any()
        # no pixel touches another only diagonally
        diag_only = g[:-1, :-1] & g[1:, 1:] & ~g[:-1, 1:] & ~g[1:, :-1]
        anti_only = g[:-1, 1:] & g[1:, :-1] & ~g[:-1, :-1] & ~g[1:, 1:]
        assert not diag_only.any() and not anti_only.any()


def test_noise_is_mostly_prescreened(luts):
    page, rm = generate(PageRecipe("noise", 256, 256, seed=4))
    assert (rm.ids == CONTONE).mean() > 0.9
    _, rep, _ = run_algorithm(page, "hybrid", "dep", luts)
    assert rep.counters["prescreen_rejections"] >= 0.8 * page.width * page.height


def test_flat_pages_are_uniform_heavy():
    page, rm = generate(uniform_heavy(0, 256))
    assert (rm.ids != BACKGROUND).mean() > 0.5
    d = page.data
    same = (d[1:-1, 1:-1] == d[:-2, 1:-1]).all(-1) & (d[1:-1, 1:-1] == d[2:, 1:-1]).all(-1)
    assert same.mean() > 0.9


def test_recipe_sets():
    assert all(r.kind == "mixed" and r.width == 1024 for r in default_recipes())
    tg = text_graphic_recipes()
    assert len(tg) == 20 and {r.kind for r in tg} == {"text", "graphic"}
    assert len({r.seed for r in tg}) == 20


def test_write_corpus(tmp_path):
    recipes = [PageRecipe("text", 64, 64, seed=1), PageRecipe("graphic", 64, 64, seed=2)]
    (tmp_path / "r.json").write_text(json.dumps([r.to_dict() for r in recipes]))
    assert load_recipes(tmp_path / "r.json") == recipes
    paths = write_corpus(recipes, tmp_path / "out")
    assert [p.name for p in paths] == ["text_64x64_s1.cmyk", "graphic_64x64_s2.cmyk"]
    for r, p in zip(recipes, paths):
        page, rm = generate(r)
        assert load_page(p) == page
        assert load_region_map(p.with_suffix(".rgn")) == rm
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert [m["seed"] for m in manifest] == [1, 2]
    shifted = write_corpus(recipes[:1], tmp_path / "o2", seed_offset=5)
    assert shifted[0].name == "text_64x64_s6.cmyk"


def test_load_recipes_errors(tmp_path):
    (tmp_path / "a.json").write_text("{not json")
    with pytest.raises(RecipeInvalid):
        load_recipes(tmp_path / "a.json")
    (tmp_path / "b.json").write_text('"text"')
    with pytest.raises(RecipeInvalid):
        load_recipes(tmp_path / "b.json")
    (tmp_path / "c.json").write_text('{"recipes": [{"kind": "text", "width": 64, "height": 64}]}')
    assert load_recipes(tmp_path / "c.json")[0].kind == "text"
