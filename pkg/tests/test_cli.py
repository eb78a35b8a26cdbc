import inspect
import io
import json

import pytest

import lynperm.cli as cli
from lynperm import flag, independence, lyndon, perm, permuton, reduction


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def js(*argv):
    code, out, _ = call(*argv)
    assert code == 0, out
    return json.loads(out)


@pytest.fixture
def spec_file(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"base": "21", "scales": ["1/2", "1/2"]}))
    return str(path)


def test_lyndon_enum():
    assert js("lyndon-enum", "--k", "3") == ["321", "312", "231", "21", "132"]
    assert js("lyndon-enum", "--k", "3", "--include-trivial")[-1] == "1"
    assert len(js("lyndon-enum", "--k", "3", "--all")) == 6


def test_flag_product_12_times_1():
    data = js("flag-product", "12", "1")
    assert data["terms"] == [["123", "1"], ["132", "2/3"], ["213", "2/3"], ["231", "1/3"], ["312", "1/3"]]
    code, out, _ = call("flag-product", "12", "1", "--output", "text")
    assert out.strip() == "123 + 2/3*132 + 2/3*213 + 1/3*231 + 1/3*312"


def test_reduce():
    assert js("reduce", "12")["polynomial"] == "1 - x[21]"
    code, out, _ = call("reduce", "12", "--output", "text")
    assert out.strip() == "1 - x[21]"


def test_reduce_with_spec(spec_file):
    data = js("reduce", "213", "--spec", spec_file)
    assert data["value"] == data["exact_density"]


def test_reduction_table():
    data = js("reduction-table", "--k", "2")
    assert data["12"] == [{"monomial": [], "coeff": "1"}, {"monomial": ["x[21]^1"], "coeff": "-1"}]


def test_blocks_and_checks():
    data = js("blocks", "21", "231")
    assert data["permutation"] == "21453" and data["blocks"] == ["21", "231"]
    assert js("lyndon-check", "21453")["lyndon"] is True
    assert js("lyndon-check", "1|1|21")["lyndon_word"] is True
    cmp = js("lyndon-check", "12", "21")
    assert cmp["compare_L"] == -1 and cmp["reduction_order"] == 1
    assert js("lyndon-counts", "--k", "4") == [1, 1, 4, 17]


def test_factorize_and_shuffle():
    data = js("factorize", "213")
    assert data["lyndon_factors"] == ["21", "1"] and data["flag_lemma_violations"] == []
    assert js("factorize", "1|21|1")["factors"] == ["1|21", "1"]
    sh = js("shuffle", "1|21", "1|231")
    assert sum(c for _, c in sh["terms"]) == 6
    assert js("shuffle", "21", "1")["max"] == ["21|1", 1]


def test_density():
    assert js("density", "12", "231")["density"] == "1/3"
    assert js("density", "21453", "--positions", "3,4,5")["pattern"] == "231"


def test_permuton_commands(spec_file):
    data = js("permuton-density", "21", "12", "--spec", spec_file, "--symbolic", "--counts", "1,2")
    assert data["densities"] == {"21": "1/2", "12": "1/2"}
    assert data["symbolic"]["21"] == "2*z[1]*z[2]"
    assert data["blowup_pattern"] == "312"
    assert data["flag_product_density"] == data["product_of_densities"] == "1/4"
    est = js("permuton-sample", "21", "--spec", spec_file, "--trials", "5000")
    assert abs(est["mean"] - 0.5) < 4 * est["standard_error"]
    assert len(js("permuton-sample", "--spec", spec_file, "--n", "7")["sample"]) == 7


def test_jacobian_and_witness(tmp_path):
    point = tmp_path / "pt.json"
    point.write_text(json.dumps({"s[1]": "1/2", "t[1,1]": "1/4", "t[1,2]": "1/4"}))
    data = js("jacobian", "--k", "2", "--point", str(point))
    assert data["matrix"] == [["1/8"]] and data["determinant"] == "1/8"
    assert data["monomial_coefficient"] == "4"
    cert = js("witness", "--k", "3", "--seed", "2")
    assert cert["determinant"] != "0" and len(cert["matrix"]) == 5
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(cert))
    assert js("verify", "--certificate", str(path))["valid"] is True
    assert js("verify", "--lemma", "321", "21")["holds"] is True


def test_byte_identical_output():
    for argv in (["witness", "--k", "3", "--seed", "7"], ["lyndon-enum", "--k", "4"], ["reduction-table", "--k", "3"]):
        assert call(*argv)[1] == call(*argv)[1]


def test_error_codes(spec_file):
    code, out, _ = call("density", "123", "21")
    assert code == 1 and "error" in json.loads(out)
    code, out, _ = call("reduce", "123456")
    assert code == 1 and json.loads(out)["error"]["type"] == "bound_exceeded"
    assert call("reduce", "123456", "--max-size", "6")[0] == 0
    assert call("nonsense")[0] == 2
    assert call("lyndon-enum", "--k", "3", "--bogus")[0] == 2
    assert call("lyndon-enum")[0] == 2
    assert call("permuton-density", "12")[0] == 2
    code, out, err = call("density", "1213", "1", "--output", "text")
    assert code == 1 and out == "" and err


def test_text_mode_marks_floats():
    _, out, _ = call("density", "12", "231", "--output", "text")
    assert out.startswith("1/3") and "(float)" in out


LIBRARY_OPERATIONS = {
    perm: ["parse_permutation", "direct_sum", "decompose_blocks", "is_indecomposable", "increasing_segments",
           "pattern_at", "pattern_density", "enumerate_permutations"],
    lyndon: ["alphabet_compare", "is_lyndon_word", "cfl_factorize", "block_word_of", "compare_L",
             "is_lyndon_permutation", "enumerate_lyndon_permutations", "lyndon_counts_from_series",
             "shuffle_product", "max_shuffle_constituent"],
    flag: ["flag_product", "constituents_violating_flag_lemma", "density_of_sum"],
    permuton: ["make_blowup", "blowup_pattern", "exact_density", "symbolic_density", "sample_permutation",
               "estimate_density"],
    reduction: ["reduction_order_compare", "lyndon_factor_permutation", "reduce_to_lyndon",
                "build_reduction_table", "evaluate_polynomial"],
    independence: ["build_PiL", "density_in_s_t", "jacobian_matrix", "jacobian_determinant", "find_witness",
                   "det_monomial_coefficient", "verify_lemma_lyndon"],
}


def test_dispatch_covers_every_operation():
    parser = cli.build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    commands = set(sub.choices)
    listed = [op for ops in LIBRARY_OPERATIONS.values() for op in ops]
    assert sorted(listed) == sorted(cli.OPERATIONS)
    for module, ops in LIBRARY_OPERATIONS.items():
        for op in ops:
            assert callable(getattr(module, op))
            assert cli.OPERATIONS[op] in commands
    assert set(cli.OPERATIONS.values()) <= commands


def test_handlers_reference_their_operations():
    # the subcommand assigned to an operation must actually call it
    handlers = {name: parser_fn for name, parser_fn in _handlers().items()}
    indirect = {"reduce_to_lyndon": "build_reduction_table", "make_blowup": "_need_spec",
                "evaluate_polynomial": "evaluate", "parse_permutation": "parse_permutation"}
    for op, command in cli.OPERATIONS.items():
        src = inspect.getsource(handlers[command])
        assert op in src or indirect.get(op, op) in src, (op, command)


def _handlers():
    parser = cli.build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    return {name: p.get_default("func") for name, p in sub.choices.items()}
