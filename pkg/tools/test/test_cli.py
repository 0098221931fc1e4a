"""コマンドラインのテスト（出力と終了コード）"""

import pytest

from cli.exceptions import EXIT_CYCLE, EXIT_ERROR, EXIT_HIDDEN_DEPENDENCY, EXIT_OK, EXIT_USAGE
from cli.main import run


@pytest.fixture
def modlock(capsys):
    """run() を呼んで (終了コード, 標準出力, 標準エラー出力) を返す"""
    def invoke(root, *args: str) -> tuple[int, str, str]:
        code = run(["--root", str(root), "--plain", *args])
        captured = capsys.readouterr()
        return code, captured.out, captured.err
    return invoke


def test_compile_prints_one_status_per_module(modlock, copy_fixture):
    code, out, _ = modlock(copy_fixture("accounts"), "compile", "CustomerGUI")
    assert code == EXIT_OK
    assert out.splitlines() == [
        "compiled Hibernate",
        "compiled EntityToJava",
        "compiled Account",
        "compiled Customer",
        "generated EntityToJava(Account)",
        "generated EntityToJava(Customer)",
        "compiled CustomerGUI",
    ]


def test_second_compile_restores_from_the_cache(modlock, copy_fixture):
    root = copy_fixture("accounts")
    modlock(root, "compile", "CustomerGUI")
    code, out, _ = modlock(root, "compile", "CustomerGUI")
    assert code == EXIT_OK
    assert {line.split()[0] for line in out.splitlines()} == {"restored"}
    assert len(out.splitlines()) == 7


def test_check_reports_the_hidden_hibernate(modlock, copy_fixture):
    code, out, _ = modlock(copy_fixture("accounts_hidden"), "check", "CustomerGUI")
    assert code == EXIT_HIDDEN_DEPENDENCY
    assert out.splitlines() == [
        "hidden dependency in EntityToJava(Customer): Hibernate",
        "  via EntityToJava(Customer) <- CustomerGUI",
    ]


def test_check_in_summary_mode_names_the_innermost_generated_module(modlock, copy_fixture):
    code, out, _ = modlock(copy_fixture("accounts_hidden"), "--detection", "summary", "check", "CustomerGUI")
    assert code == EXIT_HIDDEN_DEPENDENCY
    assert out.splitlines()[0] == "hidden dependency in EntityToJava(Account): Hibernate"


def test_check_accepts_a_legitimate_workspace(modlock, copy_fixture):
    code, out, _ = modlock(copy_fixture("accounts"), "check", "CustomerGUI")
    assert code == EXIT_OK
    assert out.strip() == "no hidden dependencies in CustomerGUI"


def test_compile_of_the_hidden_workspace_fails_with_a_trace(modlock, copy_fixture):
    code, out, err = modlock(copy_fixture("accounts_hidden"), "compile", "CustomerGUI")
    assert code == EXIT_HIDDEN_DEPENDENCY
    assert "error:" in err
    assert "while compiling EntityToJava(Customer) <- CustomerGUI" in err


def test_deps_lists_declared_dependencies(modlock, copy_fixture):
    root = copy_fixture("entities")
    code, out, _ = modlock(root, "deps", "customer")
    assert code == EXIT_OK
    assert out.splitlines() == ["account"]
    _, out, _ = modlock(root, "deps", "logged-bank")
    assert out.splitlines() == ["logging.Decorate", "entity-to-record", "account"]


def test_deps_does_not_compile(modlock, copy_fixture):
    root = copy_fixture("entities")
    modlock(root, "deps", "bank")
    assert not (root / ".modcache").exists()


def test_expand_prints_the_generated_module(modlock, copy_fixture):
    root = copy_fixture("entities")
    code, out, _ = modlock(root, "expand", "entity-to-record(account)")
    assert code == EXIT_OK
    assert out.startswith("(module (imports) (base")
    assert "make-account" in out
    _, again, _ = modlock(root, "expand", "entity-to-record(account)")
    assert again == out


def test_expand_rejects_malformed_import_text(modlock, copy_fixture):
    code, _, err = modlock(copy_fixture("entities"), "expand", "entity-to-record(")
    assert code == EXIT_USAGE
    assert "IMPORT_EXPR" in err
    assert "expected a module name" in err


def test_graph_draws_declared_edges_solid_and_generation_edges_dashed(modlock, copy_fixture):
    code, out, _ = modlock(copy_fixture("accounts"), "graph", "CustomerGUI")
    assert code == EXIT_OK
    assert out.startswith("digraph modules {")
    assert '\t"EntityToJava(Customer)" -> Customer [style=dashed]\n' in out
    assert '\tCustomerGUI -> Customer\n' in out
    assert '\tCustomer -> Account\n' in out
    assert '\tCustomerGUI -> EntityToJava\n' in out
    assert '\tCustomerGUI -> "EntityToJava(Customer)" [style=dotted]\n' in out
    assert '\tCustomerGUI -> "EntityToJava(Customer)"\n' not in out
    assert '\t"EntityToJava(Customer)" -> Hibernate [style=dotted]\n' in out


def test_rebuild_without_a_cache_compiles_every_module(modlock, copy_fixture):
    code, out, _ = modlock(copy_fixture("accounts"), "rebuild")
    assert code == EXIT_OK
    assert sorted(line.removeprefix("compiled ") for line in out.splitlines()) == sorted(
        [
            "Account",
            "Customer",
            "CustomerGUI",
            "EntityToJava",
            "EntityToJava(Account)",
            "EntityToJava(Customer)",
            "Hibernate",
        ]
    )


def test_rebuild_after_a_change_recompiles_only_dependents(modlock, copy_fixture):
    root = copy_fixture("accounts")
    modlock(root, "compile", "CustomerGUI")
    hibernate = root / "Hibernate.mod"
    hibernate.write_text(hibernate.read_text(encoding="utf-8") + "\n; touched\n", encoding="utf-8")
    code, out, _ = modlock(root, "rebuild")
    assert code == EXIT_OK
    recompiled = [line.removeprefix("compiled ") for line in out.splitlines()]
    assert set(recompiled) == {
        "Hibernate",
        "EntityToJava",
        "EntityToJava(Account)",
        "EntityToJava(Customer)",
        "CustomerGUI",
    }


def test_rebuild_with_explicit_paths(modlock, copy_fixture):
    root = copy_fixture("accounts")
    modlock(root, "compile", "CustomerGUI")
    code, out, _ = modlock(root, "rebuild", "CustomerGUI.mod")
    assert code == EXIT_OK
    assert out.splitlines() == ["compiled CustomerGUI"]


def test_missing_module_is_a_usage_error(modlock, copy_fixture):
    code, _, err = modlock(copy_fixture("entities"), "compile", "no.Such")
    assert code == EXIT_USAGE
    assert "no.Such" in err


def test_cycle_has_its_own_exit_code(modlock, copy_fixture):
    code, _, err = modlock(copy_fixture("cycle"), "compile", "A")
    assert code == EXIT_CYCLE
    assert "error:" in err


def test_evaluation_error_exits_with_one(modlock, copy_fixture):
    root = copy_fixture("entities")
    (root / "bad.mod").write_text("(module (imports) (base (define x (car 1))))", encoding="utf-8")
    code, _, err = modlock(root, "compile", "bad")
    assert code == EXIT_ERROR
    assert "while compiling bad" in err


@pytest.mark.parametrize("args", [["--no-such-option", "compile", "x"], ["frobnicate"], ["compile"]])
def test_usage_errors(copy_fixture, capsys, args):
    assert run(["--root", str(copy_fixture("entities")), *args]) == EXIT_USAGE


def test_root_must_exist(tmp_path, capsys):
    assert run(["--root", str(tmp_path / "absent"), "compile", "x"]) == EXIT_USAGE


def test_step_budget_option_limits_evaluation(modlock, copy_fixture):
    root = copy_fixture("entities")
    code = run(["--root", str(root), "--plain", "--step-budget", "10", "compile", "bank"])
    assert code == EXIT_ERROR
    assert modlock(root, "compile", "factorial")[0] == EXIT_OK


def test_step_budget_from_the_environment(modlock, copy_fixture, monkeypatch):
    root = copy_fixture("entities")
    monkeypatch.setenv("MODLOCK_STEP_BUDGET", "10")
    code, _, err = modlock(root, "compile", "bank")
    assert code == EXIT_ERROR
    assert err.rstrip().endswith("bank")
    monkeypatch.delenv("MODLOCK_STEP_BUDGET")
    assert modlock(root, "compile", "bank")[0] == EXIT_OK
