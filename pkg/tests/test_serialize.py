"""Payload round trips: bit-exact for finite doubles."""

import json
import math

import numpy as np

from cstarflow import BlockShape, FlowGenerator, HermitianElement
from cstarflow.sampling import random_element, random_flow, random_operator, rng
from cstarflow.serialize import (
    dumps,
    element_from_payload,
    element_to_payload,
    flow_from_payload,
    flow_to_payload,
    loads,
    operator_from_payload,
    operator_to_payload,
)


def test_element_roundtrip_random():
    x = random_element(rng(0), BlockShape([2, 3]))
    back = element_from_payload(loads(dumps(element_to_payload(x))))
    for a, b in zip(back.blocks, x.blocks):
        np.testing.assert_array_equal(a, b)


def test_element_roundtrip_awkward_doubles():
    tricky = np.array(
        [
            [complex(1.0 / 3.0, -0.0), complex(5e-324, 1e308)],
            [complex(-2.2250738585072014e-308, math.pi), complex(0.1 + 0.2, -1e-17)],
        ]
    )
    from cstarflow import AlgebraElement

    x = AlgebraElement.from_blocks([tricky])
    text = dumps(element_to_payload(x))
    back = element_from_payload(json.loads(text))
    np.testing.assert_array_equal(back.blocks[0], tricky)


def test_payload_layout_row_major_pairs():
    from cstarflow import AlgebraElement

    x = AlgebraElement.from_blocks([np.array([[1.0, 2.0 + 3.0j], [0.0, -1.0j]])])
    payload = element_to_payload(x)
    assert payload == {
        "blocks": [[[1.0, 0.0], [2.0, 3.0], [0.0, 0.0], [-0.0, -1.0]]]
    }


def test_flow_kind_tag():
    h = HermitianElement.from_blocks([np.diag([1.0, 2.0])])
    auto = FlowGenerator(h, h)
    assert flow_to_payload(auto)["kind"] == "automorphism"
    g = random_flow(rng(1), BlockShape([2]), 1.0)
    assert flow_to_payload(g)["kind"] == "two-sided"
    back = flow_from_payload(flow_to_payload(g))
    assert (back.h_left.value - g.h_left.value).norm() == 0.0
    assert (back.h_right.value - g.h_right.value).norm() == 0.0


def test_operator_roundtrip():
    s = random_operator(rng(2), BlockShape([2, 2]), 2)
    back = operator_from_payload(loads(dumps(operator_to_payload(s))))
    assert (back - s).norm() == 0.0
    assert back.k == s.k
