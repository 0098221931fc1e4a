"""フィクスチャのワークスペース全体を通した実行結果のテスト"""

import logging

import pytest

from modlock.config import reload_settings
from modlock.core import Apply, Simple, get_model
from modlock.exceptions import HiddenDependencyError, ModlockError, UserRaisedError
from modlock.lang import TRUE, VList, VNum, VStr, apply_value
from modlock.summaries import hidden
from modlock.workspace import Workspace

FIXTURE_NAMES = ["entities", "accounts", "accounts_hidden", "atm", "cycle", "regenerate"]


def sym(text: str) -> VStr:
    return VStr(text, symbol=True)


# === 基本の例 ===

def test_factorial(make_workspace):
    fact = make_workspace("entities").compile("factorial").definition("fact")
    assert apply_value(fact, [VNum(5)]) == VNum(120)
    assert apply_value(fact, [VNum(0)]) == VNum(1)


def test_one_model_two_semantics(make_workspace):
    bank = make_workspace("entities").compile("bank")
    assert bank.definition("schema") == VStr("CREATE TABLE account (IBAN TEXT, BIC TEXT, balance INTEGER)")
    assert bank.definition("insert-checking") == VStr(
        "INSERT INTO account (IBAN, BIC, balance) VALUES ('GB29', 'NWBKGB2L', 12345)"
    )
    assert bank.definition("checking") == VList((sym("account"), VStr("GB29"), VStr("NWBKGB2L"), VNum(12345)))


def test_records_generated_for_a_single_entity(make_workspace):
    checking = make_workspace("entities").compile("test").definition("checking")
    assert checking.items[0] == sym("account")
    assert checking.items[-1] == VNum(12345)


# === current-trans による伝播 ===

def test_propagated_records_check_field_types(make_workspace):
    client = make_workspace("entities").compile("customer-client")
    assert client.definition("account-ok") == TRUE
    with pytest.raises(UserRaisedError, match="field type mismatch"):
        apply_value(client.definition("try-bad-customer"), [])


def test_propagation_rewrites_imports_by_local_name(make_workspace):
    ws = make_workspace("entities")
    ws.compile("customer-client")
    generated = ws.syntax["entity-to-records(customer)"]
    assert generated.imports == (("acc", Apply(Simple("current-trans"), (Simple("acc"),))),)
    assert get_model(ws.memo["entity-to-records(customer)"]).env.lookup("acc") is ws.memo["entity-to-records(account)"]


# === 高階変換 ===

def test_decorated_transformation_traces_calls_to_the_original_names(make_workspace, caplog):
    ws = make_workspace("entities")
    bank = ws.compile("logged-bank")
    assert bank.definition("balance") == VNum(12345)
    assert bank.definition("raw-balance") == VNum(12345)
    assert bank.definition("wrapped-count") == VNum(5)
    assert bank.definition("wrapped-names") == VList(
        tuple(sym(n) for n in ("make-account", "account?", "account-IBAN", "account-BIC", "account-balance"))
    )
    decorated = ws.memo["logging.Decorate(entity-to-record)(account)"]
    checking = bank.definition("checking")
    with caplog.at_level(logging.INFO, logger="modlock.lang.builtins"):
        assert apply_value(decorated.definition("account-IBAN"), [checking]) == VStr("GB29")
        assert apply_value(decorated.definition("account-balance:undecorated"), [checking]) == VNum(12345)
    traced = [r for r in caplog.records if r.getMessage() == "Traced call"]
    assert [(r.function, r.value) for r in traced] == [("account-IBAN", '"GB29"')]


def test_undecorated_transformation_does_not_trace(make_workspace, caplog):
    with caplog.at_level(logging.INFO, logger="modlock.lang.builtins"):
        make_workspace("entities").compile("test")
    assert not [r for r in caplog.records if r.getMessage() == "Traced call"]


def test_state_machine_simulator_over_generated_records(make_workspace):
    ws = make_workspace("atm")
    client = ws.compile("banking.ATMClient")
    assert client.definition("start") == sym("idle")
    assert client.definition("final") == sym("card-inserted")
    assert client.definition("stuck") == sym("idle")
    assert client.definition("data-ok") == TRUE
    assert "statemachine.data.Simulator(entity.ToRecord)(banking.DataATM)" in ws.memo


# === 検出方式の一致 ===

def _outcome(root, mode: str, name: str) -> tuple:
    ws = Workspace(root, settings=reload_settings(detection=mode, cache_enabled=False))
    try:
        ws.compile(name)
    except HiddenDependencyError as e:
        return ("HiddenDependencyError", tuple(e.names))
    except ModlockError as e:
        return (type(e).__name__,)
    return ("ok",)


@pytest.mark.parametrize("fixture", FIXTURE_NAMES)
def test_detection_modes_agree_on_every_module(copy_fixture, fixture):
    root = copy_fixture(fixture)
    names = Workspace(root).source_names()
    assert names
    for name in names:
        assert _outcome(root, "environment", name) == _outcome(root, "summary", name), name


@pytest.mark.parametrize("mode", ["environment", "summary"])
def test_direct_application_is_rejected_in_both_modes(make_workspace, mode):
    ws = make_workspace("accounts_hidden", detection=mode)
    with pytest.raises(HiddenDependencyError) as exc_info:
        ws.compile_import("EntityToJava(Account)")
    assert exc_info.value.generated == "EntityToJava(Account)"
    assert exc_info.value.names == ["Hibernate"]


@pytest.mark.parametrize("mode", ["environment", "summary"])
def test_legitimate_corpus_compiles_in_both_modes(make_workspace, mode):
    ws = make_workspace("entities", detection=mode)
    for name in ws.source_names():
        ws.compile(name)
    for summary in ws.store:
        assert hidden(summary.module_id, ws.store) == frozenset(), summary.module_id
