# Copyright 2026 The toyfock Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import toyfock as tf


def unit(n=1):
    v = np.zeros(n, dtype=complex)
    v[0] = 1.0
    return v


def test_partition_and_step_function():
    tau = tf.Partition.uniform(4, 1.0)
    assert tau.cells == 4
    assert tau.mesh == pytest.approx(0.25)
    assert tf.Partition.dyadic(3, 1.0).refines(tau)
    f = tf.StepFunction.scalar_indicator(0.0, 1.0)
    assert [complex(x[0]) for x in f.coarse_grain(tau)] == pytest.approx([0.5] * 4)
    assert tf.exp_inner(f, f) == pytest.approx(math.e)


def test_creation_on_vacuum_matches_compound_interest():
    n = 16
    tau = tf.Partition.uniform(n, 1.0)
    f = tf.StepFunction.scalar_indicator(0.0, 1.0)
    x = tf.noise.creation(1, 1)
    got = tf.sigma_element(x, tau, 1.0, unit(), f, unit(), f)
    assert got == pytest.approx((1 + 1 / n) ** n - 1, abs=1e-12)
    limit = tf.lambda_element(x, 1.0, unit(), f, unit(), f)
    assert limit == pytest.approx(math.e - 1, abs=1e-12)


def test_apply_and_element_paths_agree():
    tau = tf.Partition.dyadic(4, 1.0)
    f = tf.StepFunction(1, [0.0, 0.3, 0.8], [np.array([0.4 + 0.1j]), np.array([-0.2j])])
    g = tf.StepFunction.scalar_indicator(0.1, 0.6, 0.5)
    x = tf.random_operator(1, 1, 2, 11)
    theta = tf.embed_exponential(unit(), g, tau)
    apply_path = tf.embed_exponential(unit(), f, tau).inner(tf.sigma_apply(x, tau, 0.7, theta))
    assert apply_path == pytest.approx(tf.sigma_element(x, tau, 0.7, unit(), f, unit(), g),
                                       abs=1e-12)


def test_ito_identity_and_subordinate_oracle():
    tau = tf.Partition.dyadic(3, 1.0)
    y = tf.random_operator(2, 1, 1, 1)
    x = tf.random_operator(2, 1, 1, 2)
    f = tf.StepFunction.scalar_indicator(0.0, 0.45, 0.7)
    theta = tf.embed_exponential(unit(2), f, tau)
    assert tf.ito_identity_residual(y, x, tau, 0.9, theta) < 1e-12
    z = tf.random_operator(2, 1, 2, 3)
    disc = tf.sigma_element(z, tau, 0.9, unit(2), f, unit(2), f)
    orac = tf.lambda_element(z, 0.9, unit(2), f, unit(2), f, weight="discrete",
                             projection=tau, weight_partition=tau, subordinate=tau)
    assert disc == pytest.approx(orac, rel=1e-10, abs=1e-12)


def test_operator_matrix_round_trip():
    a = tf.noise.annihilation(1, 2, 1)
    assert a.matrix.shape == (3, 3)
    assert np.allclose(a.adjoint().matrix, tf.noise.creation(1, 2, 1).matrix)
    b = tf.CoupledOperator(a.matrix, 1, 2, 1)
    assert np.array_equal((b @ b.adjoint()).matrix, a.matrix @ a.matrix.conj().T)


def test_config_and_studies():
    cfg = tf.parse_config("""{
      "partitions": {"family": "dyadic", "levels": [2, 3, 4, 5, 6]},
      "functions": {"e": {"breakpoints": [0, 0.37], "values": [1]}},
      "operators": {"c": {"preset": "creation"}},
      "studies": [{"name": "w", "kind": "weak-convergence", "operator": "c",
                   "probes": [{"f": "e", "g": "e"}], "min_slope": 0.9}]
    }""")
    assert cfg.studies == ["w"]
    r = tf.run_study(cfg, "w")
    assert r["passed"]
    assert r["fits"][0]["slope"] > 0.9
    assert r["csv"].startswith("study,level,mesh,probe,")
    assert "| study |" in tf.csv_to_markdown(r["csv"])
    assert tf.run_validate(cfg)["passed"]
    with pytest.raises(KeyError):
        tf.run_study(cfg, "nope")


def test_config_errors_name_the_key():
    with pytest.raises(tf.ConfigError, match=r"studies\[0\]\.bogus"):
        tf.parse_config('{"studies": [{"kind": "validate", "bogus": 1}]}')


def test_fit_rate():
    h = [2.0 ** -k for k in range(1, 8)]
    fit = tf.fit_rate(h, [x ** 2 for x in h])
    assert fit.slope == pytest.approx(2.0)
    assert fit.points == 5
    assert tf.fit_rate(h[:4], h[:4]) is None
