import json

import pytest

from freeping import INFINITY, BudgetExceeded, normalize_map, point
from freeping.certifier import (CertifyBudget, Inconclusive, IndependenceCertificate,
                                RelationCertificate, certificate_from_json,
                                certify_independence, find_relation, rational_preperiodic_points,
                                rational_roots, scan_pairs_in_ball, verify_certificate)
from freeping.heights import is_preperiodic
from freeping.projective import compose

z2 = normalize_map([1, 0, 0], [0, 0, 1])
z2m2 = normalize_map([1, 0, -2], [0, 0, 1])
z2m1 = normalize_map([1, 0, -1], [0, 0, 1])
z3 = normalize_map([1, 0, 0, 0], [0, 0, 0, 1])
z4 = normalize_map([1, 0, 0, 0, 0], [0, 0, 0, 0, 1])
neg = normalize_map([-1, 0], [0, 1])
shift = normalize_map([1, 1], [0, 1])


def test_rational_roots():
    # (X - 2Y)(3X + Y) = 3X^2 - 5XY - 2Y^2
    assert rational_roots([3, -5, -2], 100) == {point(2), point(-1, 3)}
    assert rational_roots([0, 1, 0], 10) == {INFINITY, point(0)}
    assert rational_roots([1, 0, -2], 100) == set()


@pytest.mark.parametrize("f, period, depth, expected", [
    (z2, 2, 1, {point(0), INFINITY, point(1), point(-1)}),
    (z2m2, 1, 0, {INFINITY, point(2), point(-1)}),
    (z2m1, 2, 1, {INFINITY, point(0), point(-1), point(1)}),
])
def test_rational_preperiodic_points_examples(f, period, depth, expected):
    assert rational_preperiodic_points(f, period, depth) == expected


def test_rational_preperiodic_points_are_preperiodic():
    for f in (z2, z2m1, z2m2, normalize_map([1, 0, 1], [0, 2, 0])):
        for p in rational_preperiodic_points(f, 3, 3):
            assert is_preperiodic(f, p).is_preperiodic


def test_rational_preperiodic_budget():
    with pytest.raises(BudgetExceeded):
        rational_preperiodic_points(z2m2, 3, 0, CertifyBudget(degree_limit=4))


def test_certify_free_pair():
    cert = certify_independence(z2, z2m2)
    assert isinstance(cert, IndependenceCertificate)
    assert cert.witness == point(2)
    assert cert.preperiodic_for == 2
    assert cert.verify()
    obj = json.loads(json.dumps(cert.to_json()))
    assert obj["kind"] == "independence"
    assert verify_certificate(obj)
    assert certificate_from_json(obj) == cert


def test_certify_commuting_pair():
    cert = certify_independence(z2, z4)
    assert isinstance(cert, RelationCertificate)
    assert (cert.word1, cert.word2) == ((1, 2), (2, 1))
    assert cert.composed == normalize_map([1] + [0] * 8, [0] * 8 + [1])
    assert verify_certificate(cert.to_json())


def test_certify_equal_pair():
    cert = certify_independence(z2, z2)
    assert isinstance(cert, RelationCertificate)
    assert (cert.word1, cert.word2) == ((1,), (2,))


def test_certify_open_question_pair_is_inconclusive():
    result = certify_independence(z2, z2m1)
    assert isinstance(result, Inconclusive)
    assert result.to_json()["kind"] == "inconclusive"


def test_certify_needs_degree_two():
    with pytest.raises(ValueError):
        certify_independence(neg, z2)


def test_symmetry():
    for f, g in [(z2, z2m2), (z2, z4), (z2m1, z2m2), (z3, z2m2)]:
        a = certify_independence(f, g)
        b = certify_independence(g, f)
        assert type(a) is type(b)
        if isinstance(a, IndependenceCertificate):
            assert b.verify()


def test_never_both():
    # a free pair has no relation, a relation pair never certifies
    rel, _ = find_relation((z2, z2m2), 6)
    assert rel is None
    for f, g in [(z2, z4), (z2, z3), (z3, z4)]:
        assert not isinstance(certify_independence(f, g), IndependenceCertificate)
        assert find_relation((f, g), 4)[0] is not None


def test_tampered_certificates_fail():
    obj = certify_independence(z2, z2m2).to_json()
    obj["witness"] = {"a": "3", "b": "1"}
    assert not verify_certificate(obj)
    obj = certify_independence(z2, z4).to_json()
    obj["word2"] = [1, 1]
    assert not verify_certificate(obj)
    assert not verify_certificate({"schema": "other/9", "kind": "relation"})
    assert not verify_certificate({"schema": "freeping/1", "kind": "inconclusive"})


def test_scan_pairs_finds_delta_bound():
    report = scan_pairs_in_ball([neg, z2m2, z2])
    assert report.independent
    assert report.delta_bound <= 2
    a, b = report.elements
    assert report.certificate.verify()
    assert {a, b} == {z2m2, z2}


def test_scan_pairs_sigma_pair():
    # only the z+1 shift separates: z^2 and z^2+1 have different PrePer sets
    report = scan_pairs_in_ball([shift, z2])
    assert report.pair == (0, 2, 1, 2)
    assert report.elements[1] == compose(shift, z2)
    assert report.certificate.witness == point(0)
    assert report.delta_bound == 2


def test_scan_pairs_inconclusive_cases():
    assert not scan_pairs_in_ball([z2]).independent
    report = scan_pairs_in_ball([z2, z4])
    assert not report.independent
    assert report.relations and all(r.verify() for r in report.relations)


def test_scan_pairs_parallel_matches_serial():
    serial = scan_pairs_in_ball([shift, neg, z2], workers=1).to_json()
    parallel = scan_pairs_in_ball([shift, neg, z2], workers=3).to_json()
    assert serial == parallel
