"""Physical parameter sets, scenario presets and density-matrix helpers.

All rates and frequencies are plain numbers expressed in units of a reference
rate (normally ``gamma_bc``).  The unit is carried as a label on the parameter
set and is never converted.

Basis ordering is fixed everywhere in the package:

* two-electron kinds: index 0, 1, 2 = |A>, |B>, |C>, where
  |A> = {c, b} occupied, |B> = {a, c} occupied, |C> = {a, b} occupied;
* one-electron V kind: index 0, 1, 2 = |a>, |b>, |c>.

In both cases index 2 is the level the two fields share.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import DarkholeError

A, B, C = 0, 1, 2

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-8


class ModelKind(str, enum.Enum):
    V_ONE_ELECTRON = "V_ONE_ELECTRON"
    LAMBDA_TWO_ELECTRON = "LAMBDA_TWO_ELECTRON"
    LAMBDA_TWO_ELECTRON_EE = "LAMBDA_TWO_ELECTRON_EE"

    @property
    def two_electron(self):
        return self is not ModelKind.V_ONE_ELECTRON


@dataclass(frozen=True)
class SystemParams:
    """Inputs of one simulation.

    ``rabi_alpha`` couples level 0 to the shared level 2 and ``rabi_beta``
    couples level 1 to it.  The electron-electron quantities ``shift_A``,
    ``shift_B``, ``shift_C`` and ``chi`` only enter for
    ``LAMBDA_TWO_ELECTRON_EE``.  ``level_energies`` is documentation only.
    """

    model_kind: ModelKind = ModelKind.LAMBDA_TWO_ELECTRON
    rabi_alpha: complex = 0j
    rabi_beta: complex = 0j
    detuning_alpha: float = 0.0
    detuning_beta: float = 0.0
    gamma_ac: float = 0.0
    gamma_bc: float = 0.0
    shift_A: float = 0.0
    shift_B: float = 0.0
    shift_C: float = 0.0
    chi: complex = 0j
    reference_rate: str = "gamma_bc"
    level_energies: tuple | None = None

    def __post_init__(self):
        kind = self.model_kind
        if not isinstance(kind, ModelKind):
            try:
                kind = ModelKind(str(kind).strip().upper())
            except ValueError:
                raise DarkholeError("BAD_MODEL_KIND", f"unknown model kind {self.model_kind!r}") from None
            object.__setattr__(self, "model_kind", kind)
        for name in ("rabi_alpha", "rabi_beta", "chi"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        for name in ("detuning_alpha", "detuning_beta", "gamma_ac", "gamma_bc",
                     "shift_A", "shift_B", "shift_C"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    @property
    def modulation_delta(self):
        """Residual oscillation frequency of the A-B exchange coupling."""
        return self.detuning_alpha - self.detuning_beta

    @property
    def has_ee(self):
        return self.model_kind is ModelKind.LAMBDA_TWO_ELECTRON_EE

    @property
    def is_autonomous(self):
        return not (self.has_ee and self.chi != 0 and self.modulation_delta != 0)


@dataclass(frozen=True)
class ValidatedParams(SystemParams):
    """A :class:`SystemParams` that passed :func:`validate_params`."""

    warnings: tuple = ()


def validate_params(params, normalize_phases=False):
    """Check rate signs and return a :class:`ValidatedParams`.

    Vanishing decay rates are not an error; they are recorded as the
    ``ALL_RATES_ZERO`` warning since the steady state is then not unique.
    With ``normalize_phases`` the basis phases of levels 0 and 1 are rotated so
    that both Rabi frequencies become real and non-negative; ``chi`` picks up
    the matching phase.  Nothing is changed otherwise.
    """
    for name in ("gamma_ac", "gamma_bc"):
        value = getattr(params, name)
        if not value >= 0:
            raise DarkholeError("NEGATIVE_RATE", f"{name} = {value!r} must be >= 0")
    warnings = []
    if params.gamma_ac == 0 and params.gamma_bc == 0:
        warnings.append("ALL_RATES_ZERO")
    fields = {f.name: getattr(params, f.name) for f in dataclasses.fields(SystemParams)}
    if normalize_phases:
        phase_a = np.angle(params.rabi_alpha)
        phase_b = np.angle(params.rabi_beta)
        fields["rabi_alpha"] = complex(abs(params.rabi_alpha))
        fields["rabi_beta"] = complex(abs(params.rabi_beta))
        fields["chi"] = complex(params.chi * np.exp(1j * (phase_a - phase_b)))
    return ValidatedParams(**fields, warnings=tuple(warnings))


def ensure_valid(params):
    if isinstance(params, ValidatedParams):
        return params
    return validate_params(params)


# --- parameter files -------------------------------------------------------

PARAM_KEYS = (
    "model_kind", "rabi_alpha", "rabi_beta", "detuning_alpha", "detuning_beta",
    "gamma_ac", "gamma_bc", "shift_A", "shift_B", "shift_C", "chi", "reference_rate",
)
_COMPLEX_KEYS = {"rabi_alpha", "rabi_beta", "chi"}
_REAL_KEYS = {"detuning_alpha", "detuning_beta", "gamma_ac", "gamma_bc",
              "shift_A", "shift_B", "shift_C"}


def format_complex(z):
    z = complex(z)
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def parse_complex(text):
    text = text.strip().replace(" ", "")
    if not text:
        raise ValueError("empty value")
    if text.endswith("i"):
        text = text[:-1] + "j"
    return complex(text)


def coerce_value(key, text):
    """Convert the text of one ``key = value`` entry to its Python value."""
    if key in _COMPLEX_KEYS:
        return parse_complex(text)
    if key in _REAL_KEYS:
        return float(text)
    if key == "model_kind":
        return ModelKind(text.strip().upper())
    if key == "reference_rate":
        return text.strip()
    raise KeyError(key)


def format_params(params):
    lines = []
    for key in PARAM_KEYS:
        value = getattr(params, key)
        if key in _COMPLEX_KEYS:
            text = format_complex(value)
        elif key in _REAL_KEYS:
            text = repr(float(value))
        elif key == "model_kind":
            text = value.value
        else:
            text = str(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def parse_params(text, base=None):
    """Parse flat ``key = value`` text.  Unknown keys and bad values raise
    ``PARSE_ERROR`` with the offending line number."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DarkholeError("PARSE_ERROR", f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in PARAM_KEYS:
            raise DarkholeError("PARSE_ERROR", f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = coerce_value(key, value)
        except ValueError as exc:
            raise DarkholeError("PARSE_ERROR", f"line {lineno}: bad value for {key}: {exc}") from None
    base = base if base is not None else SystemParams()
    fields = {f.name: getattr(base, f.name) for f in dataclasses.fields(SystemParams)}
    fields.update(values)
    return SystemParams(**fields)


def load_params(path):
    with open(path) as fh:
        return parse_params(fh.read())


def write_text_atomic(path, text):
    """Write via a temporary file in the target directory and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise DarkholeError("IO_ERROR", str(exc)) from exc


def save_params(params, path):
    write_text_atomic(path, format_params(params))


# --- presets ----------------------------------------------------------------

@dataclass(frozen=True)
class ExpectedFeature:
    """One spectral expectation attached to a preset.

    ``source`` says where the number comes from: ``"reported"`` for the
    published spectrum, ``"model"`` for what the derived
    generator predicts.
    """

    kind: str
    position: float
    tolerance: float
    source: str
    note: str = ""


@dataclass(frozen=True)
class ScenarioPreset:
    name: str
    params: ValidatedParams
    description: str
    expected_features: tuple = field(default_factory=tuple)


def _fig4():
    params = SystemParams(
        model_kind=ModelKind.LAMBDA_TWO_ELECTRON_EE,
        rabi_alpha=0.1, rabi_beta=0.1,
        detuning_alpha=0.0, detuning_beta=0.0,
        gamma_ac=1.0, gamma_bc=1.0,
        chi=0.3,
    )
    features = (
        ExpectedFeature("dip", 0.0, 0.05, "reported", "central dark resonance"),
        ExpectedFeature("dip", -0.3, 0.05, "reported", "satellite at -chi"),
        ExpectedFeature("dip", 0.3, 0.05, "reported", "satellite at +chi"),
        ExpectedFeature("dip", -0.6, 0.05, "model", "satellite at -2|chi| (A-B splitting)"),
        ExpectedFeature("dip", 0.6, 0.05, "model", "satellite at +2|chi| (A-B splitting)"),
    )
    return ScenarioPreset(
        "fig4", validate_params(params),
        "Dark resonance with exchange satellites: gamma_ac = gamma_bc = 1, "
        "alpha = beta = 0.1, detuning_beta = 0, chi = 0.3 (units of gamma_bc); "
        "scan detuning_alpha.",
        features,
    )


def _calcium():
    params = SystemParams(
        model_kind=ModelKind.LAMBDA_TWO_ELECTRON_EE,
        rabi_alpha=0.1, rabi_beta=0.1,
        gamma_ac=1.0, gamma_bc=1.0,
        chi=0.0,
    )
    return ScenarioPreset(
        "calcium_ns_np", validate_params(params),
        "Ortho calcium with sigma+/sigma- fields: a = 4p+, b = 4p-, c = 4s, so "
        "A = 4s4p-, B = 4s4p+, C = 4p+4p- (4s4p -> 4p4p near 2.9 eV). The A-B "
        "exchange coupling vanishes by angular momentum addition (chi = 0); the "
        "diagonal shifts are placeholders set to 0.",
        (ExpectedFeature("dip", 0.0, 0.05, "reported", "single dark resonance"),),
    )


def _lithium():
    params = SystemParams(
        model_kind=ModelKind.LAMBDA_TWO_ELECTRON_EE,
        rabi_alpha=0.1, rabi_beta=0.1,
        gamma_ac=1.0, gamma_bc=1.0,
        chi=0.0,
    )
    return ScenarioPreset(
        "ortho_lithium", validate_params(params),
        "Ortho lithium (three aligned spins) with the 1s2s2p and 1s2p2p states. "
        "No exchange magnitudes are known here: shifts and chi default to 0 and "
        "must be set by the user.",
        (ExpectedFeature("dip", 0.0, 0.05, "model", "dark resonance while chi = 0"),),
    )


def _template():
    params = SystemParams(model_kind=ModelKind.LAMBDA_TWO_ELECTRON_EE, gamma_ac=1.0, gamma_bc=1.0)
    return ScenarioPreset(
        "custom-template", validate_params(params),
        "Starting point for custom parameter files: unit decay rates, fields off.",
    )


_PRESETS = {
    "fig4": _fig4,
    "calcium_ns_np": _calcium,
    "ortho_lithium": _lithium,
    "custom-template": _template,
}

PRESET_NAMES = tuple(_PRESETS)


def scenario_preset(name):
    try:
        return _PRESETS[name]()
    except KeyError:
        raise DarkholeError("UNKNOWN_PRESET", f"no preset named {name!r}; "
                            f"choose from {', '.join(PRESET_NAMES)}") from None


# --- density matrices -------------------------------------------------------

def ket(index, dim=3):
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def pure_state(vector):
    v = np.asarray(vector, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def projector(index):
    return pure_state(ket(index))


def mixed_state(dim=3):
    return np.eye(dim, dtype=complex) / dim


def hermitize(rho):
    """Return (rho + rho^dagger)/2 and the size of the correction."""
    sym = 0.5 * (rho + rho.conj().T)
    return sym, float(np.max(np.abs(sym - rho)))


def check_density_matrix(rho, code="INVALID_STATE", herm_tol=HERMITICITY_TOL,
                         trace_tol=TRACE_TOL, pos_tol=POSITIVITY_TOL):
    """Raise :class:`DarkholeError` unless ``rho`` is a valid 3x3 state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (3, 3):
        raise DarkholeError(code, f"density matrix must be 3x3, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise DarkholeError(code, "density matrix has non-finite entries")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > herm_tol:
        raise DarkholeError("HERMITICITY_VIOLATION", f"max |rho - rho^dagger| = {herm:.3g}")
    trace = np.trace(rho)
    if abs(trace - 1) > trace_tol:
        raise DarkholeError(code, f"trace = {trace:.12g}, expected 1")
    lowest = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    if lowest < -pos_tol:
        raise DarkholeError(code, f"smallest eigenvalue {lowest:.3g} < 0")
    return rho
