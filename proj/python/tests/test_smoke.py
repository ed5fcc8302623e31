import json

import pytest

import _kzmodp as m


def test_classify_pair():
    pr = m.classify_pair(7, 2)
    assert pr["type"] == 1
    assert pr["k"] == 1
    assert pr["M"] == 3
    assert pr["c"] == 1

    assert m.classify_pair(5, 3)["type"] == 2
    assert m.classify_pair(7, 3) == {"p": 7, "q": 3, "k": 1, "type": 1, "M": 2, "c": 3}

    with pytest.raises(ValueError):
        m.classify_pair(4, 2)


def test_construct_solution_document():
    doc = json.loads(m.construct_solution_json(5, 2, 1, 1, [1]))
    assert doc["p"] == 5 and doc["q"] == 2 and doc["n"] == 3
    assert doc["zero"] is False
    comps = {tuple(c["J"]): c["terms"] for c in doc["components"]}
    assert comps[(1,)] == [
        {"exp": [1, 0, 0], "coef": 4},
        {"exp": [0, 1, 0], "coef": 3},
        {"exp": [0, 0, 1], "coef": 3},
    ]
    assert comps[(2,)][0] == {"exp": [1, 0, 0], "coef": 3}

    zero = json.loads(m.construct_solution_json(5, 2, 1, 2, [1, 1]))
    assert zero["zero"] is True
    assert zero["components"] == []


def test_solution_checks():
    checks = m.solution_checks(5, 2, 1, 2, [2, 1])
    assert checks["zero"] is False
    assert checks["singular"] is True
    assert checks["kz"] is True
    assert checks["degree"] == 2 * 5 - 4


def test_certify_rank():
    cert = m.certify_rank(5, 2, 1, 2)
    assert cert["ok"] is True
    assert cert["rank"] == 1
    assert cert["basis"][0]["L"] == [2, 1]
    assert cert["basis"][0]["leading_index"] == [1, 3]

    cert3 = m.certify_rank(7, 2, 3, 1)
    assert cert3["rank"] == 3


def test_cartier_and_symmetric_functions():
    assert m.verify_reconstruction(5, 2, 1, 1) is True
    assert m.schur_str([2, 1], 2, 7) == "t1^2*t2 + t1*t2^2"
    parts = m.partitions(1, 2)
    assert parts == [[1, 1], [1, 0], [0, 0]]
    k = m.kostka([2, 0])
    assert k[(2, 0)] == 1 and k[(1, 1)] == 1


def test_misc():
    assert m.binom_mod_p(4, 2, 5) == 1
    assert m.singular_dimension(5, 2, 5) == 5
    assert m.shifted_master_congruence(3, 2, 1, 1, 1, [1, 0, 0]) is True


def test_size_guard():
    with pytest.raises(RuntimeError):
        m.construct_solution_json(11, 2, 2, 2, [2, 1], max_terms=50)
