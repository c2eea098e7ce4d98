"""Setpoint composition of a high-level policy over a frozen low-level one.

The low level is any callable (robot_obs, targets) -> action loaded from a
parameter file or supplied as a scripted controller; the high level emits
one or two 3D hand targets that get clipped to the task workspace before
the low level is queried.
"""

import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

PARAM_MAGIC = b"HLP1"


@dataclass(frozen=True)
class ClipBox:
    low: tuple
    high: tuple

    def clip(self, points: np.ndarray) -> np.ndarray:
        return np.clip(points, np.asarray(self.low), np.asarray(self.high))


@dataclass
class SetpointCommand:
    targets: np.ndarray          # (1,3) one-hand or (2,3) two-hand
    clip_box: ClipBox

    def clipped(self) -> np.ndarray:
        return self.clip_box.clip(self.targets)


class LowLevelPolicy:
    """Frozen reaching policy with hashable parameters."""

    frozen = True

    def __call__(self, robot_obs: np.ndarray, targets: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def param_bytes(self) -> bytes:
        return b""

    def param_hash(self) -> str:
        return hashlib.sha256(self.param_bytes()).hexdigest()


class ScriptedHoldPolicy(LowLevelPolicy):
    """Emits a constant action regardless of observation or targets."""

    def __init__(self, action: np.ndarray):
        self.action = np.asarray(action, dtype=np.float64)

    def __call__(self, robot_obs, targets):
        return self.action.copy()

    def param_bytes(self) -> bytes:
        return self.action.tobytes()


class LinearPolicy(LowLevelPolicy):
    """tanh(W @ [obs, targets] + b); the file-format reference implementation."""

    def __init__(self, weight: np.ndarray, bias: np.ndarray, target_dim: int,
                 name: str = "linear"):
        self.weight = np.asarray(weight, dtype=np.float64)
        self.bias = np.asarray(bias, dtype=np.float64)
        self.target_dim = int(target_dim)
        self.name = name
        if self.weight.shape[0] != self.bias.shape[0]:
            raise ValueError("weight/bias output dims differ")

    @property
    def input_dim(self) -> int:
        return self.weight.shape[1] - self.target_dim

    @property
    def output_dim(self) -> int:
        return self.weight.shape[0]

    def __call__(self, robot_obs, targets):
        features = np.concatenate([np.asarray(robot_obs, dtype=np.float64),
                                   np.asarray(targets, dtype=np.float64).ravel()])
        if features.shape[0] != self.weight.shape[1]:
            raise ValueError(f"policy expects {self.weight.shape[1]} inputs, "
                             f"got {features.shape[0]}")
        return np.tanh(self.weight @ features + self.bias)

    def param_bytes(self) -> bytes:
        return self.weight.tobytes() + self.bias.tobytes()


def save_policy(path, policy: LinearPolicy) -> None:
    manifest = {
        "name": policy.name,
        "kind": "linear",
        "input_dim": policy.input_dim,
        "target_dim": policy.target_dim,
        "output_dim": policy.output_dim,
        "arrays": [["weight", list(policy.weight.shape)],
                   ["bias", list(policy.bias.shape)]],
        "dtype": "float64",
    }
    blob = json.dumps(manifest, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(PARAM_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(policy.weight.tobytes())
        fh.write(policy.bias.tobytes())


def load_policy(path) -> LinearPolicy:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != PARAM_MAGIC:
            raise ValueError(f"not a policy parameter file: magic {magic!r}")
        (length,) = struct.unpack("<I", fh.read(4))
        manifest = json.loads(fh.read(length).decode("utf-8"))
        arrays = {}
        for name, shape in manifest["arrays"]:
            count = int(np.prod(shape))
            arrays[name] = np.frombuffer(fh.read(count * 8), dtype=np.float64).reshape(shape)
    return LinearPolicy(arrays["weight"], arrays["bias"], manifest["target_dim"],
                        name=manifest.get("name", "linear"))


class ComposedPolicy:
    """Environment-facing policy: high-level setpoints through a frozen low level.

    Both levels run at the control rate by default; setpoint_period > 1
    re-queries the high level only every that many control steps and holds
    the last clipped setpoints in between.
    """

    def __init__(self, high, low: LowLevelPolicy, clip_box: ClipBox, hands: int = 1,
                 setpoint_period: int = 1):
        if hands not in (1, 2):
            raise ValueError("hands must be 1 (push-style) or 2 (package-style)")
        if setpoint_period < 1:
            raise ValueError("setpoint_period must be >= 1")
        self.high = high
        self.low = low
        self.clip_box = clip_box
        self.hands = hands
        self.setpoint_period = setpoint_period
        self.last_command = None
        self._steps = 0

    def act(self, obs: np.ndarray) -> np.ndarray:
        if self.last_command is None or self._steps % self.setpoint_period == 0:
            raw = np.asarray(self.high(obs), dtype=np.float64)
            if raw.size != self.hands * 3:
                raise ValueError(f"expected {self.hands * 3} setpoint dims, got {raw.size}")
            if not np.all(np.isfinite(raw)):
                raise ValueError("non-finite setpoint")
            command = SetpointCommand(raw.reshape(self.hands, 3), self.clip_box)
            self.last_command = SetpointCommand(command.clipped(), self.clip_box)
        self._steps += 1
        targets = self.last_command.targets
        action = np.asarray(self.low(obs, targets), dtype=np.float64)
        if not np.all(np.isfinite(action)):
            raise ValueError("low-level policy produced non-finite action")
        return action


def compose(high, low: LowLevelPolicy, clip_box: ClipBox, hands: int = 1,
            setpoint_period: int = 1) -> ComposedPolicy:
    return ComposedPolicy(high, low, clip_box, hands=hands,
                          setpoint_period=setpoint_period)
