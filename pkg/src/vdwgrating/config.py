"""Line-oriented run configuration.

Grammar: one `section.key = value` assignment per line; blank lines and
lines starting with `#` are ignored.  Keys are fixed by the table below;
unknown keys, duplicates, type errors and range violations raise
ConfigError carrying the line number.

    geometry.d            grating period, nm                   required
    geometry.s0           slit width, nm (0 < s0 < d)          required
    geometry.t            bar depth, nm                        required
    geometry.beta_deg     wall wedge angle, degrees [0, 90)    required
    beam.species          label, e.g. He*                      required
    beam.mass_u           atom mass, u                         required
    beam.velocity_mps     mean beam velocity, m/s              required
    beam.dv_over_u        relative velocity FWHM [0, 1)        default 0
    potential.c3_mev_nm3  wall C3, meV nm^3 (>= 0)             required
    material.band_gap_ev  Tauc-Lorentz E_T, eV                 optional group
    material.strength_ev  Tauc-Lorentz E_A, eV                 optional group
    material.resonance_ev Tauc-Lorentz E_O, eV                 optional group
    material.width_ev     Tauc-Lorentz E_G, eV                 optional group
    material.g0           static surface response (0, 1)       optional
    material.es_ev        surface oscillator energy, eV        optional
    atom.alpha0_nm3       static polarizability, nm^3          optional pair
    atom.ea_ev            atom oscillator energy, eV           optional pair
    atom.table            path to an alpha(iE) table file      optional
    run.n_max             highest diffraction order (>= 1)     required
    run.tolerance         quadrature tolerance                 default 1e-8
    run.seed              RNG seed (>= 0)                      default 0

The four material.*_ev keys form a group: give all or none.  Likewise
atom.alpha0_nm3 and atom.ea_ev come as a pair.  Which optional keys a
command actually needs depends on the theory route; parsing only checks
structural consistency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, InvalidInputError
from .grating import BeamState, GratingGeometry, Potential
from .lifshitz import OneOscillatorAtom, TaucLorentzParams

__all__ = ["KEY_TABLE", "RunConfig", "load_config", "parse_config"]


def _int_value(raw):
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"not an integer: {raw!r}") from None


def _float_value(raw):
    try:
        v = float(raw)
    except ValueError:
        raise ValueError(f"not a number: {raw!r}") from None
    if not math.isfinite(v):
        raise ValueError(f"not finite: {raw!r}")
    return v


def _str_value(raw):
    if not raw:
        raise ValueError("empty value")
    return raw


# key -> (converter, range check or None, help text)
KEY_TABLE = {
    "geometry.d": (_float_value, lambda v: v > 0, "grating period, nm"),
    "geometry.s0": (_float_value, lambda v: v > 0, "slit width, nm"),
    "geometry.t": (_float_value, lambda v: v > 0, "bar depth, nm"),
    "geometry.beta_deg": (_float_value, lambda v: 0 <= v < 90,
                          "wall wedge angle, degrees"),
    "beam.species": (_str_value, None, "species label"),
    "beam.mass_u": (_float_value, lambda v: v > 0, "atom mass, u"),
    "beam.velocity_mps": (_float_value, lambda v: v > 0,
                          "mean beam velocity, m/s"),
    "beam.dv_over_u": (_float_value, lambda v: 0 <= v < 1,
                       "relative velocity FWHM"),
    "potential.c3_mev_nm3": (_float_value, lambda v: v >= 0,
                             "wall C3, meV nm^3"),
    "material.band_gap_ev": (_float_value, lambda v: v > 0,
                             "Tauc-Lorentz band gap, eV"),
    "material.strength_ev": (_float_value, lambda v: v > 0,
                             "Tauc-Lorentz strength, eV"),
    "material.resonance_ev": (_float_value, lambda v: v > 0,
                              "Tauc-Lorentz resonance, eV"),
    "material.width_ev": (_float_value, lambda v: v > 0,
                          "Tauc-Lorentz width, eV"),
    "material.g0": (_float_value, lambda v: 0 < v < 1,
                    "static surface response"),
    "material.es_ev": (_float_value, lambda v: v > 0,
                       "surface oscillator energy, eV"),
    "atom.alpha0_nm3": (_float_value, lambda v: v > 0,
                        "static polarizability, nm^3"),
    "atom.ea_ev": (_float_value, lambda v: v > 0,
                   "atom oscillator energy, eV"),
    "atom.table": (_str_value, None, "path to alpha(iE) table"),
    "run.n_max": (_int_value, lambda v: v >= 1, "highest order"),
    "run.tolerance": (_float_value, lambda v: 0 < v <= 1e-2,
                      "quadrature tolerance"),
    "run.seed": (_int_value, lambda v: v >= 0, "RNG seed"),
}

_REQUIRED = (
    "geometry.d", "geometry.s0", "geometry.t", "geometry.beta_deg",
    "beam.species", "beam.mass_u", "beam.velocity_mps",
    "potential.c3_mev_nm3", "run.n_max",
)

_REQUIRED_SECTIONS = ("geometry", "beam", "potential", "run")

_MATERIAL_GROUP = ("material.band_gap_ev", "material.strength_ev",
                   "material.resonance_ev", "material.width_ev")
_ATOM_PAIR = ("atom.alpha0_nm3", "atom.ea_ev")

_DEFAULTS = {
    "beam.dv_over_u": 0.0,
    "run.tolerance": 1e-8,
    "run.seed": 0,
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration.

    material / atom / surface pieces are None when their keys are
    absent; commands that need them raise ConfigError at dispatch.
    """

    species: str
    geometry: GratingGeometry
    beam: BeamState
    potential: Potential
    n_max: int
    tolerance: float
    seed: int
    material: TaucLorentzParams | None = None
    g0: float | None = None
    es_ev: float | None = None
    atom: OneOscillatorAtom | None = None
    table_path: str | None = None

    def resolved_items(self):
        """Canonical `key = value` pairs, defaults applied.

        Floats are emitted with repr so a written report re-parses to
        bit-identical values.
        """
        geo = self.geometry
        items = [
            ("geometry.d", repr(geo.period)),
            ("geometry.s0", repr(geo.slit_width)),
            ("geometry.t", repr(geo.bar_depth)),
            ("geometry.beta_deg", repr(math.degrees(geo.wedge_angle))),
            ("beam.species", self.species),
            ("beam.mass_u", repr(self.beam.mass_u)),
            ("beam.velocity_mps", repr(self.beam.velocity)),
            ("beam.dv_over_u", repr(self.beam.dv_over_u)),
            ("potential.c3_mev_nm3", repr(self.potential.c3)),
        ]
        if self.material is not None:
            items += [
                ("material.band_gap_ev", repr(self.material.band_gap)),
                ("material.strength_ev", repr(self.material.strength)),
                ("material.resonance_ev", repr(self.material.resonance)),
                ("material.width_ev", repr(self.material.width)),
            ]
        if self.g0 is not None:
            items.append(("material.g0", repr(self.g0)))
        if self.es_ev is not None:
            items.append(("material.es_ev", repr(self.es_ev)))
        if self.atom is not None:
            items += [
                ("atom.alpha0_nm3", repr(self.atom.alpha0)),
                ("atom.ea_ev", repr(self.atom.energy)),
            ]
        if self.table_path is not None:
            items.append(("atom.table", self.table_path))
        items += [
            ("run.n_max", str(self.n_max)),
            ("run.tolerance", repr(self.tolerance)),
            ("run.seed", str(self.seed)),
        ]
        return items


def parse_config(text, source="<config>"):
    """Parse config text into a RunConfig.  See the module docstring."""
    values = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}: expected 'section.key = value'",
                              line=lineno)
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key.count(".") != 1 or not all(key.split(".")):
            raise ConfigError(f"{source}: malformed key {key!r}",
                              line=lineno, key=key or None)
        if key not in KEY_TABLE:
            raise ConfigError(f"{source}: unknown key {key!r}",
                              line=lineno, key=key)
        if key in values:
            raise ConfigError(f"{source}: duplicate key {key!r}",
                              line=lineno, key=key)
        convert, check, _ = KEY_TABLE[key]
        try:
            value = convert(raw_value)
        except ValueError as exc:
            raise ConfigError(f"{source}: {key}: {exc}",
                              line=lineno, key=key) from None
        if check is not None and not check(value):
            raise ConfigError(f"{source}: {key}: value {raw_value} out of "
                              "range", line=lineno, key=key)
        values[key] = value
        lines[key] = lineno

    if not values:
        raise ConfigError(
            f"{source}: empty configuration; required sections: "
            + ", ".join(_REQUIRED_SECTIONS))
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"{source}: missing required key(s): "
                          + ", ".join(missing))

    present_material = [k for k in _MATERIAL_GROUP if k in values]
    if present_material and len(present_material) != len(_MATERIAL_GROUP):
        absent = sorted(set(_MATERIAL_GROUP) - set(present_material))
        raise ConfigError(
            f"{source}: partial material group; also need "
            + ", ".join(absent), line=lines[present_material[0]])
    present_atom = [k for k in _ATOM_PAIR if k in values]
    if present_atom and len(present_atom) != len(_ATOM_PAIR):
        absent = sorted(set(_ATOM_PAIR) - set(present_atom))
        raise ConfigError(
            f"{source}: partial atom pair; also need " + ", ".join(absent),
            line=lines[present_atom[0]])

    try:
        geometry = GratingGeometry(
            period=values["geometry.d"],
            slit_width=values["geometry.s0"],
            bar_depth=values["geometry.t"],
            wedge_angle=math.radians(values["geometry.beta_deg"]))
    except InvalidInputError as exc:
        raise ConfigError(f"{source}: geometry: {exc}",
                          line=lines["geometry.s0"]) from None
    beam = BeamState(
        mass_u=values["beam.mass_u"],
        velocity=values["beam.velocity_mps"],
        dv_over_u=values.get("beam.dv_over_u", _DEFAULTS["beam.dv_over_u"]))
    potential = Potential(c3=values["potential.c3_mev_nm3"])

    material = None
    if present_material:
        material = TaucLorentzParams(
            band_gap=values["material.band_gap_ev"],
            strength=values["material.strength_ev"],
            resonance=values["material.resonance_ev"],
            width=values["material.width_ev"])
    atom = None
    if present_atom:
        atom = OneOscillatorAtom(alpha0=values["atom.alpha0_nm3"],
                                 energy=values["atom.ea_ev"])

    return RunConfig(
        species=values["beam.species"],
        geometry=geometry,
        beam=beam,
        potential=potential,
        n_max=values["run.n_max"],
        tolerance=values.get("run.tolerance", _DEFAULTS["run.tolerance"]),
        seed=values.get("run.seed", _DEFAULTS["run.seed"]),
        material=material,
        g0=values.get("material.g0"),
        es_ev=values.get("material.es_ev"),
        atom=atom,
        table_path=values.get("atom.table"))


def load_config(path):
    """Read and parse a config file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))
