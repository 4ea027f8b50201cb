"""
Experiment controller for the gadget toolkit.
Handles config loading and validation, dispatch of the experiment kinds,
parallel sweep points and the slope summaries written next to each table.
"""
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd

from controllers.boolean_controller import BooleanController
from controllers.gadget_controller import KET1, PAULI_X, GadgetController
from controllers.hamiltonian_controller import HamiltonianController
from controllers.lightcone_controller import LightconeController
from controllers.operator_controller import OperatorController
from controllers.rotation_controller import RotationController
from controllers.zeno_controller import ZenoController
from models.experiment import ExperimentConfig, WindowExperiment
from models.gadget import GadgetInstance
from models.hamiltonian import LocalHamiltonian, LocalTerm
from models.operator import PAULI_MATRICES, PauliString, SiteLayout
from models.zeno import SimulationTask
from utils.errors import ConfigError, GadgetLabError, NumericalError, SchemaError
from utils.fitting import fit_slope
from utils.settings import VERSION
from utils.validation import Field, validate_int, validate_pauli_label, validate_schema

logger = logging.getLogger(__name__)

SUBDIVISION = "subdivision"
THREE_TO_TWO = "three-to-two"
EXACT = "exact-three-to-two"
SECOND_ORDER_EXAMPLE = "second-order-example"

SWEEP_GADGETS = (SUBDIVISION, THREE_TO_TWO, SECOND_ORDER_EXAMPLE)
ALL_GADGETS = SWEEP_GADGETS + (EXACT,)

DEFAULT_DELTAS = {
    SUBDIVISION: [1e2, 1e3, 1e4, 1e5, 1e6],
    SECOND_ORDER_EXAMPLE: [1e2, 1e3, 1e4, 1e5, 1e6],
    THREE_TO_TWO: [1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9],
    EXACT: [1e2, 1e4, 1e6],
}

# (low, high) windows for log-log slopes; None leaves a side open
SLOPE_WINDOWS = {
    SUBDIVISION: {"eta": (-0.65, -0.35), "eps": (None, -0.35)},
    SECOND_ORDER_EXAMPLE: {"eps": (-0.65, -0.35)},
    THREE_TO_TWO: {"eps": (-0.45, -0.22)},
}

ZENO_WINDOWS = {"err0": (1.85, 2.15), "amp1": (1.35, 1.65)}
LEAK_WINDOW = (1.8, 2.2)
ERROR_RATIO_WINDOW = (1.6, 2.6)

SCHEMAS = {
    ExperimentConfig.GADGET_VERIFY: {
        "gadget": Field(Field.STR, default=SUBDIVISION, choices=ALL_GADGETS),
        "delta": Field(Field.FLOAT, default=1e4, minimum=1.0),
        "paulis": Field(Field.STR_LIST, default=None, choices=("X", "Y", "Z")),
        "samples": Field(Field.INT, default=20, minimum=2, maximum=10000),
        "j_max": Field(Field.FLOAT, default=1.0, minimum=0.0),
    },
    ExperimentConfig.GADGET_SWEEP: {
        "gadget": Field(Field.STR, default=SUBDIVISION, choices=SWEEP_GADGETS),
        "deltas": Field(Field.FLOAT_LIST, default=None, minimum=1.0),
        "paulis": Field(Field.STR_LIST, default=None, choices=("X", "Y", "Z")),
    },
    ExperimentConfig.GADGET_COMBINE: {
        "n_sites": Field(Field.INT, default=3, minimum=2, maximum=6),
        "delta": Field(Field.FLOAT, default=1e4, minimum=1.0),
    },
    ExperimentConfig.ZENO_SWEEP: {
        "paulis": Field(Field.STR_LIST, default=["ZII", "IZI", "IIZ"]),
        "delta_t_exponents": Field(Field.INT_LIST, default=[4, 5, 6, 7, 8, 9, 10], minimum=0, maximum=30),
        "chain_sites": Field(Field.INT, default=0, minimum=0, maximum=10),
        "chain_zz": Field(Field.FLOAT, default=1.0),
        "chain_x": Field(Field.FLOAT, default=1.0),
    },
    ExperimentConfig.ZENO_SIMULATE: {
        "paulis": Field(Field.STR_LIST, default=["ZII", "IZI", "IIZ"]),
        "delta_t_exponents": Field(Field.INT_LIST, default=[5, 6, 7], minimum=0, maximum=16),
        "t_max": Field(Field.FLOAT, default=1.0, minimum=0.0),
        "observable": Field(Field.STR, default="XII"),
        "target_eps": Field(Field.FLOAT, default=0.5, minimum=0.0),
    },
    ExperimentConfig.LIGHTCONE_SWEEP: {
        "n_full": Field(Field.INT, default=11, minimum=3, maximum=12),
        "m_list": Field(Field.INT_LIST, default=[3, 5, 7, 9, 11], minimum=1),
        "t": Field(Field.FLOAT, default=0.5, minimum=0.0),
        "g": Field(Field.FLOAT, default=1.0),
        "zz": Field(Field.FLOAT, default=1.0),
        "observable": Field(Field.STR, default="Z", choices=("X", "Y", "Z")),
    },
    ExperimentConfig.BOOLFUN: {
        "n": Field(Field.INT, default=3, minimum=1, maximum=16),
        "k": Field(Field.INT, default=3, minimum=1, maximum=16),
        "k_prime": Field(Field.INT, default=2, minimum=1, maximum=16),
        "minimax": Field(Field.BOOL, default=True),
    },
    ExperimentConfig.ENERGY_BOUND: {
        "gadget": Field(Field.STR, default=THREE_TO_TWO, choices=ALL_GADGETS),
        "deltas": Field(Field.FLOAT_LIST, default=None, minimum=1.0),
        "paulis": Field(Field.STR_LIST, default=None, choices=("X", "Y", "Z")),
    },
}

TOP_LEVEL_KEYS = {"kind", "parameters", "seed", "out_path"}


def _call_point(payload):
    """
    Process-pool entry point: rebuild the controller and run one sweep point.
    """
    settings, method, args = payload
    return getattr(ExperimentController(settings), method)(*args)


def _slope_check(fit, window):
    low, high = window
    result = fit.to_dict()
    result["window"] = [low, high]
    result["pass"] = (low is None or fit.slope >= low) and (high is None or fit.slope <= high)
    return result


class ExperimentController:
    """
    Controller for experiment runs.
    """

    def __init__(self, settings):
        """
        Initialize the experiment controller and the controllers it drives.

        Args:
            settings: Settings instance
        """
        self.settings = settings
        self.operators = OperatorController(settings)
        self.hamiltonians = HamiltonianController(settings, self.operators)
        self.rotations = RotationController(settings, self.operators)
        self.gadgets = GadgetController(settings, self.operators, self.hamiltonians, self.rotations)
        self.booleans = BooleanController(settings)
        self.zeno = ZenoController(settings, self.operators, self.hamiltonians)
        self.lightcone = LightconeController(settings, self.operators, self.hamiltonians)

    # ------------------------------------------------------------------
    # Configuration
    # ------------------------------------------------------------------

    def load_config(self, path, kind=None, overrides=None):
        """
        Read and validate a JSON config file.

        Args:
            path: Config file path
            kind: Kind requested on the command line; must match the file
            overrides: Mapping of top-level fields (seed, out_path) to override

        Returns:
            ExperimentConfig
        """
        try:
            with open(path, "r", encoding="utf-8") as handle:
                doc = json.load(handle)
        except FileNotFoundError as e:
            raise ConfigError(f"Config file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise SchemaError(f"Config is not valid JSON: {e}") from e
        if not isinstance(doc, dict):
            raise SchemaError("Config must be a JSON object")
        if kind is not None:
            if "kind" in doc and doc["kind"] != kind:
                raise ConfigError(f"Config kind {doc['kind']!r} does not match requested {kind!r}")
            doc = dict(doc, kind=kind)
        for key, value in (overrides or {}).items():
            if value is not None:
                doc[key] = value
        return self.validate_config(doc)

    def validate_config(self, doc):
        """
        Check a config document against the schema of its kind.

        Returns:
            ExperimentConfig with defaults filled in
        """
        unknown = sorted(set(doc) - TOP_LEVEL_KEYS)
        if unknown:
            raise SchemaError(f"Unknown config key(s): {unknown}")
        kind = doc.get("kind")
        if kind not in SCHEMAS:
            raise SchemaError(f"Unknown experiment kind: {kind!r}")
        seed = validate_int(doc.get("seed", 0))
        if seed is None or seed < 0:
            raise SchemaError(f"'seed' must be a non-negative integer, got {doc.get('seed')!r}")
        out_path = doc.get("out_path")
        if out_path is not None and not isinstance(out_path, str):
            raise SchemaError("'out_path' must be a string")
        parameters = validate_schema(doc.get("parameters", {}), SCHEMAS[kind], kind)
        self._check_parameters(kind, parameters)
        return ExperimentConfig(kind, parameters, seed, out_path)

    def _check_parameters(self, kind, parameters):
        if "paulis" in parameters and kind in (ExperimentConfig.ZENO_SWEEP, ExperimentConfig.ZENO_SIMULATE):
            labels = [validate_pauli_label(label, "paulis") for label in parameters["paulis"]]
            if len(labels) != 3 or len({len(label) for label in labels}) != 1:
                raise SchemaError("'paulis' must hold three labels of equal length")
            parameters["paulis"] = labels
        if kind == ExperimentConfig.ZENO_SIMULATE:
            observable = validate_pauli_label(parameters["observable"], "observable")
            if len(observable) != len(parameters["paulis"][0]):
                raise SchemaError("'observable' must have the same length as the Pauli labels")
            parameters["observable"] = observable
        if kind == ExperimentConfig.ZENO_SWEEP and 0 < parameters["chain_sites"] < len(parameters["paulis"][0]):
            raise SchemaError("'chain_sites' must be 0 or at least the Pauli label length")
        if kind == ExperimentConfig.BOOLFUN and not parameters["k_prime"] < parameters["k"] <= parameters["n"]:
            raise SchemaError("boolfun needs k' < k <= n")
        if kind == ExperimentConfig.LIGHTCONE_SWEEP:
            m_list = parameters["m_list"]
            if any(b <= a for a, b in zip(m_list, m_list[1:])) or m_list[-1] > parameters["n_full"]:
                raise SchemaError("'m_list' must be strictly increasing and at most n_full")
        gadget = parameters.get("gadget")
        if gadget is not None and parameters.get("paulis") is not None:
            expected = 2 if gadget == SUBDIVISION else 3
            if gadget != SECOND_ORDER_EXAMPLE and len(parameters["paulis"]) != expected:
                raise SchemaError(f"{gadget} takes {expected} Pauli letters")

    def config_hash(self, config):
        """
        sha256 of the canonical JSON of kind, parameters and seed.
        """
        canonical = json.dumps({"kind": config.kind, "parameters": config.parameters, "seed": config.seed},
                               sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def provenance(self, config):
        return {"tool": "gadgetlab", "version": VERSION, "kind": config.kind,
                "seed": config.seed, "config_sha256": self.config_hash(config)}

    # ------------------------------------------------------------------
    # Dispatch
    # ------------------------------------------------------------------

    def run(self, config, jobs=1):
        """
        Run one experiment.

        Args:
            config: ExperimentConfig
            jobs: Worker processes for independent sweep points

        Returns:
            (pandas DataFrame of result rows, summary dictionary)
        """
        handlers = {
            ExperimentConfig.GADGET_VERIFY: self._run_gadget_verify,
            ExperimentConfig.GADGET_SWEEP: self._run_gadget_sweep,
            ExperimentConfig.GADGET_COMBINE: self._run_gadget_combine,
            ExperimentConfig.ZENO_SWEEP: self._run_zeno_sweep,
            ExperimentConfig.ZENO_SIMULATE: self._run_zeno_simulate,
            ExperimentConfig.LIGHTCONE_SWEEP: self._run_lightcone_sweep,
            ExperimentConfig.BOOLFUN: self._run_boolfun,
            ExperimentConfig.ENERGY_BOUND: self._run_energy_bound,
        }
        logger.info("Running %s (seed %d, %d job(s))", config.kind, config.seed, jobs)
        try:
            table, checks = handlers[config.kind](config.parameters, config.seed, jobs)
        except GadgetLabError:
            raise
        except Exception as e:
            raise NumericalError(f"Error running {config.kind}: {str(e)}") from e
        summary = dict(self.provenance(config))
        summary["parameters"] = config.parameters
        summary["checks"] = checks
        summary["passed"] = all(check.get("pass", True) for check in checks.values() if isinstance(check, dict))
        logger.info("Finished %s: %d row(s), passed=%s", config.kind, len(table), summary["passed"])
        return table, summary

    def _map(self, method, arg_list, jobs):
        """
        Evaluate independent points, keeping input order.
        """
        if jobs <= 1 or len(arg_list) <= 1:
            return [getattr(self, method)(*args) for args in arg_list]
        payloads = [(self.settings, method, args) for args in arg_list]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_call_point, payloads))

    # ------------------------------------------------------------------
    # Gadgets
    # ------------------------------------------------------------------

    def second_order_example(self, delta):
        """
        Second-order gadget on two system qubits with a nonzero V1_11 block.

        V0 = Z_0 x I, V1 = Z_1 x X + (1/2) I x |1><1|; target H = Z_0 - I.
        """
        layout = SiteLayout.qubits(2)
        Z, I = PAULI_MATRICES["Z"], np.eye(2)
        target = LocalHamiltonian(layout, [LocalTerm(Z - I, (0,), "Z-I")])
        V0 = np.kron(np.kron(Z, I), I)
        V1 = np.kron(np.kron(I, Z), PAULI_X) + 0.5 * np.kron(np.eye(4), KET1)
        return self.gadgets.second_order_gadget(target, V0, V1, delta)

    def _paulis(self, gadget, paulis):
        if paulis is None:
            paulis = ["Z", "Z"] if gadget == SUBDIVISION else ["Z", "Z", "Z"]
        return [PAULI_MATRICES[p] for p in paulis]

    def build_verified_gadget(self, gadget, paulis, delta):
        """
        Construct a gadget and measure its witness.

        Low-energy gadgets are verified at the cut delta/2; the exact
        3-to-2 gadget uses its swap-based unitary.

        Returns:
            GadgetInstance with witness set
        """
        ops = self._paulis(gadget, paulis)
        if gadget == SUBDIVISION:
            instance = self.gadgets.subdivision_gadget(ops[0], ops[1], delta)
        elif gadget == THREE_TO_TWO:
            instance = self.gadgets.three_to_two_gadget(ops[0], ops[1], ops[2], delta)
        elif gadget == SECOND_ORDER_EXAMPLE:
            instance = self.second_order_example(delta)
        elif gadget == EXACT:
            instance, P_prime = self.gadgets.exact_three_to_two_low_energy(ops[0], ops[1], ops[2], delta)
            U = self.gadgets.exact_three_to_two_unitary(ops[0], ops[1])
            instance.witness = self.gadgets.verify_with_unitary(instance, None, U, P_prime)
            return instance
        else:
            raise ConfigError(f"Unknown gadget: {gadget}")
        instance.witness = self.gadgets.verify_low_energy(instance, delta / 2.0)
        return instance

    def gadget_point(self, gadget, paulis, delta):
        instance = self.build_verified_gadget(gadget, paulis, delta)
        witness = instance.witness
        target_stats = self.hamiltonians.hypergraph_stats(instance.target)
        gadget_stats = self.hamiltonians.hypergraph_stats(instance.gadget)
        bound = self.gadgets.energy_bound_check(target_stats.J, gadget_stats.k, witness, target_stats.k)
        logger.debug("%s at delta=%g: %s", gadget, delta, witness)
        return {
            "gadget": gadget,
            "delta": delta,
            "eta": witness.eta,
            "eps": witness.eps,
            "gadget_norm": witness.gadget_norm,
            "k_prime": gadget_stats.k,
            "bound_rhs": bound["rhs"],
            "bound_rhs_statement": bound["rhs_statement"],
            "bound_applicable": bound["applicable"],
            "bound_holds": bound["holds"],
        }

    def _run_gadget_verify(self, parameters, seed, jobs):
        gadget = parameters["gadget"]
        instance = self.build_verified_gadget(gadget, parameters["paulis"], parameters["delta"])
        witness = instance.witness
        rng = np.random.default_rng(seed)
        samples = self.gadgets.sample_else_hamiltonians(
            instance.n_system, parameters["samples"], parameters["j_max"], rng, adversarial_sites=[0]
        )
        estimate = self.gadgets.sample_gadget_property(instance, witness, samples)
        baseline = self.gadgets.property_residual(instance, witness, None)
        row = self.gadget_point(gadget, parameters["paulis"], parameters["delta"])
        row.update({
            "zeta_hat": estimate["zeta_hat"],
            "eps_hat": estimate["eps_hat"],
            "envelope_intercept": estimate["envelope_intercept"],
            "zeta_reference": estimate["zeta_reference"],
            "residual_at_zero": baseline,
        })
        checks = {
            "witness": {"eta": witness.eta, "eps": witness.eps},
            "gadget_property": {
                "zeta_hat": estimate["zeta_hat"],
                "eps_hat": estimate["eps_hat"],
                "samples": len(samples),
                "lower_estimate": True,
            },
            "energy_bound": {
                "applicable": row["bound_applicable"],
                "pass": row["bound_holds"] is not False,
            },
        }
        return pd.DataFrame([row]), checks

    def _gadget_rows(self, parameters, jobs):
        gadget = parameters["gadget"]
        deltas = parameters["deltas"] or DEFAULT_DELTAS[gadget]
        return self._map("gadget_point", [(gadget, parameters["paulis"], d) for d in deltas], jobs)

    def _run_gadget_sweep(self, parameters, seed, jobs):
        table = pd.DataFrame(self._gadget_rows(parameters, jobs))
        checks = {}
        for quantity, window in SLOPE_WINDOWS[parameters["gadget"]].items():
            fit = fit_slope(table["delta"], table[quantity], self.settings.noise_floor)
            checks[f"{quantity}_slope"] = _slope_check(fit, window)
        return table, checks

    def _run_energy_bound(self, parameters, seed, jobs):
        table = pd.DataFrame(self._gadget_rows(parameters, jobs))
        applicable = table[table["bound_applicable"]]
        violations = int((applicable["bound_holds"] == False).sum())  # noqa: E712
        return table, {"energy_bound": {"applicable_points": len(applicable), "violations": violations,
                                        "pass": violations == 0}}

    def combine_chain(self, n_sites, delta):
        """
        Subdivision gadgets on every bond Z_i Z_{i+1} of an open chain,
        verified individually and combined in parallel.

        Returns:
            (list of verified embedded instances, combined instance)
        """
        Z = PAULI_MATRICES["Z"]
        parts = []
        for site in range(n_sites - 1):
            local = self.gadgets.subdivision_gadget(Z, Z, delta)
            embedded = self.gadgets.embed_instance(local, n_sites, {0: site, 1: site + 1})
            embedded.witness = self.gadgets.verify_low_energy(embedded, delta / 2.0)
            parts.append(embedded)
        return parts, self.gadgets.combine_parallel(parts)

    def _run_gadget_combine(self, parameters, seed, jobs):
        n, delta = parameters["n_sites"], parameters["delta"]
        parts, combined = self.combine_chain(n, delta)
        J = combined.diagnostics["J"]
        rows = [{"component": f"bond {i}-{i + 1}", "eta": p.witness.eta, "eps": p.witness.eps,
                 "gadget_norm": p.witness.gadget_norm} for i, p in enumerate(parts)]
        rows.append({"component": "combined", "eta": combined.witness.eta, "eps": combined.witness.eps,
                     "gadget_norm": combined.witness.gadget_norm})
        eps_bound = 4.0 * sum(p.witness.eps + p.witness.eta * J for p in parts)
        gse = self.gadgets.gse_compare(combined.target, combined.gadget, combined)
        low_energy = self.gadgets.combine_low_energy_check(combined, delta=delta)
        checks = {
            "combined_eps": {"eps_prime": combined.witness.eps, "bound": eps_bound,
                             "pass": combined.witness.eps <= eps_bound},
            "ground_energy": {"difference": gse["difference"], "reference": gse["reference"],
                              "ratio": gse["difference"] / gse["reference"] if gse["reference"] else None,
                              "pass": gse["difference"] <= 5.0 * gse["reference"]},
            "low_energy": low_energy,
        }
        return pd.DataFrame(rows), checks

    # ------------------------------------------------------------------
    # Zeno
    # ------------------------------------------------------------------

    def _zeno_strings(self, labels, n_sites):
        padded = [label + "I" * (n_sites - len(label)) for label in labels]
        return [PauliString.from_label(label) for label in padded]

    def zeno_point(self, labels, exponent, chain):
        """
        step_amplitudes at delta_t = 2^{-exponent} from |+>^n.

        Args:
            labels: Three Pauli labels
            exponent: Grid exponent
            chain: (sites, zz, x) of the bystander chain, or None
        """
        n = chain[0] if chain else len(labels[0])
        A, B, C = self._zeno_strings(labels, n)
        delta_t = 2.0 ** (-exponent)
        spec = self.zeno.pauli_zeno_spec(A, B, C, delta_t)
        H_else = self.hamiltonians.pauli_chain(chain[0], zz=chain[1], x=chain[2]) if chain else None
        plus = np.ones(2 ** n) / math.sqrt(2 ** n)
        row = self.zeno.step_amplitudes(spec, plus, H_else)
        row["t"] = delta_t
        row["n_sites"] = n
        return row

    def _run_zeno_sweep(self, parameters, seed, jobs):
        chain = None
        if parameters["chain_sites"]:
            chain = (parameters["chain_sites"], parameters["chain_zz"], parameters["chain_x"])
        args = [(parameters["paulis"], e, chain) for e in parameters["delta_t_exponents"]]
        table = pd.DataFrame(self._map("zeno_point", args, jobs))
        table["seed"] = seed
        table = table[["delta_t", "t", "err0", "amp1", "n_sites", "seed"]]
        checks = {}
        for quantity, window in ZENO_WINDOWS.items():
            fit = fit_slope(table["delta_t"], table[quantity], self.settings.noise_floor)
            checks[f"{quantity}_slope"] = _slope_check(fit, window)
        return table, checks

    def _run_zeno_simulate(self, parameters, seed, jobs):
        labels = parameters["paulis"]
        n = len(labels[0])
        A, B, C = self._zeno_strings(labels, n)
        observable = PauliString.from_label(parameters["observable"])
        O = self.operators.pauli_embed(observable, SiteLayout.qubits(n)).matrix
        task = SimulationTask([], [O], parameters["t_max"], parameters["target_eps"], [parameters["observable"]])
        plus = np.ones(2 ** n) / math.sqrt(2 ** n)

        frames = []
        finals = []
        within = True
        for exponent in parameters["delta_t_exponents"]:
            delta_t = 2.0 ** (-exponent)
            spec = self.zeno.pauli_zeno_spec(A, B, C, delta_t)
            trajectory = self.zeno.simulate_zeno(spec, None, plus, task, delta_t)
            trajectory.insert(0, "delta_t", delta_t)
            trajectory["seed"] = seed
            frames.append(trajectory)
            last = trajectory.iloc[-1]
            finals.append((delta_t, float(last["obs_error"]), float(last["leak_prob"])))
            within = within and self.zeno.simulation_within_target(trajectory, task)["holds"]
        table = pd.concat(frames, ignore_index=True)

        ratios = [finals[i][1] / finals[i + 1][1] for i in range(len(finals) - 1) if finals[i + 1][1] > 0]
        low, high = ERROR_RATIO_WINDOW
        checks = {
            "error_ratio": {"ratios": ratios, "window": [low, high],
                            "pass": bool(ratios) and all(low <= r <= high for r in ratios)},
            "within_target": {"target_eps": task.target_eps, "pass": within},
        }
        if len(finals) >= 3:
            fit = fit_slope([f[0] for f in finals], [f[2] for f in finals], self.settings.noise_floor)
            checks["leak_slope"] = _slope_check(fit, LEAK_WINDOW)
        return table, checks

    # ------------------------------------------------------------------
    # Lightcone and Boolean functions
    # ------------------------------------------------------------------

    def _run_lightcone_sweep(self, parameters, seed, jobs):
        exp = WindowExperiment(parameters["n_full"], parameters["m_list"], parameters["t"],
                               zz=parameters["zz"], g=parameters["g"],
                               observable=parameters["observable"], seed=seed)
        table = self.lightcone.window_sweep(exp)
        truncated = table[table["m"] < exp.n_full]
        nonzero = truncated[truncated["abs_error"] > self.settings.noise_floor]
        checks = {"reference_floor": {"value": self.lightcone.reference_convergence(exp)}}
        if len(nonzero) >= 2:
            ratio = float(nonzero["abs_error"].iloc[0] / nonzero["abs_error"].iloc[-1])
            checks["decay"] = {"from_m": int(nonzero["m"].iloc[0]), "to_m": int(nonzero["m"].iloc[-1]),
                               "ratio": ratio, "pass": ratio >= 10.0}
        if len(nonzero) >= 3:
            tail = self.lightcone.tail_fit(truncated)
            tail["pass"] = tail["slope"] < 0 and tail["r_squared"] >= 0.9
            checks["tail_fit"] = tail
        return table, checks

    def _run_boolfun(self, parameters, seed, jobs):
        n, k, k_prime = parameters["n"], parameters["k"], parameters["k_prime"]
        f = self.booleans.bool_proof_function(n, k, k_prime)
        walsh = self.booleans.bool_walsh(f)
        rows = [{"index": i, "bits": format(i, f"0{n}b"), "f": float(f.table[i]), "walsh": float(walsh[i])}
                for i in range(f.table.size)]
        locality = self.booleans.locality(f)
        reduced = self.booleans.locality(self.booleans.bool_reduce_R(f))
        bound = self.booleans.bool_separation_bound(f, k_prime)
        checks = {
            "locality": {"f": locality, "Rf": reduced, "pass": locality - reduced == 1},
            "separation": {"bound": bound, "expected": 2.0 ** (-k_prime),
                           "pass": abs(bound - 2.0 ** (-k_prime)) <= 1e-12},
        }
        if parameters["minimax"] and n <= 10:
            distance = self.booleans.bool_minimax(f, k_prime)["distance"]
            checks["minimax"] = {"distance": distance, "pass": distance >= bound - 1e-6}
        return pd.DataFrame(rows), checks
