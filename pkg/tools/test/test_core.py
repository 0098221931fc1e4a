"""モジュール構文とコアコンパイラのテスト"""

import pytest

from modlock.core import (
    Apply,
    CBase,
    CModel,
    CTrans,
    ModuleDef,
    ModuleEnv,
    ModuleType,
    Simple,
    compile_import,
    compile_module,
    default_local_name,
    deps,
    deps_imp,
    format_import,
    get_model,
    import_from_sexpr,
    module_to_sexpr,
    observationally_equal,
    parse_import_text,
    parse_module,
    type_of,
)
from modlock.exceptions import (
    HiddenDependencyError,
    MalformedBodyError,
    MalformedModuleError,
    NotATransformationError,
    TransformationFailureError,
    UnresolvedImportError,
)
from modlock.lang import VNum, VStr
from modlock.sexpr import parse_sexpr, print_sexpr


def module(text: str) -> ModuleDef:
    return parse_module(parse_sexpr(text))


def compile_text(text: str, env: ModuleEnv | None = None):
    return compile_module(env or ModuleEnv(), module(text))


ACCOUNT = "(module (imports) (model (entity account ((IBAN string) (balance number)))))"
IDENTITY = "(module (imports) (transformation (lambda (m) m)))"
RECORD = """
(module (imports)
  (transformation
    (lambda (m) `(module (imports) (base (define name (quote ,(cadr (cadr (get-body m))))))))))
"""


# === 構文 ===

@pytest.mark.parametrize(
    "body, expected",
    [
        ("(model anything)", ModuleType.TMODEL),
        ("(base (define x 1))", ModuleType.TBASE),
        ("(base ((x 1)))", ModuleType.TBASE),
        ("(transformation (lambda (m) m))", ModuleType.TTRANS),
        ("(transformation (lambda (m) (h m)) (define (h m) m))", ModuleType.TTRANS),
    ],
)
def test_type_of(body, expected):
    assert type_of(parse_sexpr(body)) is expected


@pytest.mark.parametrize("body", ["(model)", "(model a b)", "(class Foo)", "x", "(base)", "(transformation)"])
def test_type_of_rejects_unknown_bodies(body):
    with pytest.raises(MalformedBodyError):
        type_of(parse_sexpr(body))


def test_parse_module_reads_imports_in_order():
    m = module("(module (imports (acc account) banking.Util (r (t (u a) b))) (model x))")
    assert m.imports == (
        ("acc", Simple("account")),
        ("Util", Simple("banking.Util")),
        ("r", Apply(Simple("t"), (Apply(Simple("u"), (Simple("a"),)), Simple("b")))),
    )
    assert m.local_names() == ["acc", "Util", "r"]


@pytest.mark.parametrize(
    "text",
    [
        "(module (imports) (model x) extra)",
        "(modul (imports) (model x))",
        "(module (import) (model x))",
        "(module (imports (a b) (a c)) (model x))",
        "(module (imports a (a b)) (model x))",
        "(module (imports x.a y.a) (model x))",
        "(module (imports (t a b)) (model x))",
        "(module (imports (r ())) (model x))",
        "(module (imports 3) (model x))",
        "(module (imports (l a,b)) (model x))",
        "(module (imports (l (t a,b))) (model x))",
    ],
)
def test_parse_module_rejects_malformed_modules(text):
    with pytest.raises(MalformedModuleError):
        module(text)


def test_transformation_application_needs_a_local_name():
    with pytest.raises(MalformedModuleError):
        default_local_name(Apply(Simple("t"), (Simple("a"),)))


def test_module_to_sexpr_writes_explicit_local_names():
    m = module("(module (imports banking.Account) (model x))")
    assert print_sexpr(module_to_sexpr(m)) == "(module (imports (Account banking.Account)) (model x))"
    assert parse_module(module_to_sexpr(m)) == m


def test_deps_lists_every_mentioned_module_in_order():
    m = module("(module (imports (a x) (r ((t u) x y))) (model m))")
    assert deps(m) == ["x", "t", "u", "x", "y"]
    assert deps_imp(import_from_sexpr(parse_sexpr("((t u) x y)"))) == ["t", "u", "x", "y"]


@pytest.mark.parametrize("text", ["a", "t(a)", "t(a,b)", "t(u)(a)", "x.T(y.A,z(w))"])
def test_import_text_round_trip(text):
    assert format_import(parse_import_text(text)) == text


def test_import_text_allows_spaces():
    assert parse_import_text(" t( a , b ) ") == Apply(Simple("t"), (Simple("a"), Simple("b")))


@pytest.mark.parametrize("text", ["", "t(", "t()", "t(a,)", "(a)", "t(a))", "t a"])
def test_import_text_rejects_malformed_input(text):
    with pytest.raises(MalformedModuleError):
        parse_import_text(text)


# === compile_module ===

def test_model_compiles_to_a_closure_over_its_imports():
    account = compile_text(ACCOUNT)
    customer = compile_text("(module (imports (acc account)) (model (entity customer ())))", ModuleEnv([("account", account)]))
    assert isinstance(customer, CModel)
    assert get_model(customer).env.names() == ["acc"]
    assert get_model(customer).env.lookup("acc") is account


def test_unresolved_import_names_the_missing_module():
    with pytest.raises(UnresolvedImportError) as exc_info:
        compile_text("(module (imports (a missing)) (model x))")
    assert exc_info.value.name == "missing"
    assert not isinstance(exc_info.value, HiddenDependencyError)


def test_first_binding_wins():
    first = compile_text("(module (imports) (base (define v 1)))")
    second = compile_text("(module (imports) (base (define v 2)))")
    client = compile_text(
        "(module (imports (m m)) (base (define v m:v)))",
        ModuleEnv([("m", first), ("m", second)]),
    )
    assert client.definition("v") == VNum(1)


def test_apply_runs_the_transformation_and_compiles_the_result():
    env = ModuleEnv([("account", compile_text(ACCOUNT)), ("record", compile_text(RECORD))])
    result = compile_import(env, Apply(Simple("record"), (Simple("account"),)))
    assert isinstance(result, CBase)
    assert result.definition("name") == VStr("account")
    assert print_sexpr(module_to_sexpr(get_model(result).syntax)) == (
        "(module (imports) (base (define name (quote account))))"
    )


def test_generated_module_sees_current_trans_and_arguments():
    trans = compile_text(
        "(module (imports) (transformation (lambda (m) "
        "'(module (imports (src current-arg-1) (self current-trans)) (model generated)))))"
    )
    account = compile_text(ACCOUNT)
    result = compile_import(ModuleEnv([("t", trans), ("a", account)]), Apply(Simple("t"), (Simple("a"),)))
    assert get_model(result).env.lookup("src") is account
    assert get_model(result).env.lookup("self") is trans


def test_generated_module_cannot_see_the_callers_environment():
    hibernate = compile_text("(module (imports) (base (define dialect \"h2\")))")
    leaky = compile_text(
        "(module (imports) (transformation (lambda (m) '(module (imports (h Hibernate)) (model x)))))"
    )
    env = ModuleEnv([("Hibernate", hibernate), ("leaky", leaky), ("account", compile_text(ACCOUNT))])
    with pytest.raises(HiddenDependencyError) as exc_info:
        compile_import(env, Apply(Simple("leaky"), (Simple("account"),)))
    assert exc_info.value.names == ["Hibernate"]
    assert exc_info.value.generated == "leaky(account)"


def test_generated_module_sees_the_transformations_own_imports():
    hibernate = compile_text("(module (imports) (base (define dialect \"h2\")))")
    honest = compile_text(
        "(module (imports (Hibernate Hibernate)) "
        "(transformation (lambda (m) '(module (imports (h Hibernate)) (base (define d h:dialect))))))",
        ModuleEnv([("Hibernate", hibernate)]),
    )
    result = compile_import(
        ModuleEnv([("honest", honest), ("account", compile_text(ACCOUNT))]),
        Apply(Simple("honest"), (Simple("account"),)),
    )
    assert result.definition("d") == VStr("h2")


def test_applying_a_non_transformation_fails():
    env = ModuleEnv([("account", compile_text(ACCOUNT))])
    with pytest.raises(NotATransformationError):
        compile_import(env, Apply(Simple("account"), (Simple("account"),)))


@pytest.mark.parametrize(
    "body",
    [
        "(lambda (m) (error \"unsupported model\"))",
        "(lambda (m) 42)",
        "(lambda (a b) a)",
    ],
)
def test_transformation_failures_are_wrapped(body):
    env = ModuleEnv([("t", compile_text(f"(module (imports) (transformation {body}))")), ("a", compile_text(ACCOUNT))])
    with pytest.raises(TransformationFailureError) as exc_info:
        compile_import(env, Apply(Simple("t"), (Simple("a"),)))
    assert exc_info.value.details["generated"] == "t(a)"


def test_self_regenerating_transformation_hits_the_depth_guard():
    again = compile_text(
        "(module (imports) (transformation (lambda (m) "
        "'(module (imports (next (current-trans current-arg-1))) (model (again))))))"
    )
    env = ModuleEnv([("Again", again), ("Seed", compile_text("(module (imports) (model (seed)))"))])
    with pytest.raises(TransformationFailureError, match="nested deeper"):
        compile_import(env, Apply(Simple("Again"), (Simple("Seed"),)))


def test_higher_order_application():
    wrap = compile_text(
        "(module (imports) (transformation (lambda (t) "
        "'(module (imports (inner current-arg-1)) "
        "(transformation (lambda (m) `(module (imports) (model (wrapped ,(get-body m))))))))))"
    )
    env = ModuleEnv([("wrap", wrap), ("id", compile_text(IDENTITY)), ("a", compile_text(ACCOUNT))])
    result = compile_import(env, Apply(Apply(Simple("wrap"), (Simple("id"),)), (Simple("a"),)))
    assert isinstance(result, CModel)
    assert print_sexpr(get_model(result).syntax.body).startswith("(model (wrapped (model (entity account")


# === 観測的等価性 ===

def test_recompiling_the_same_module_is_observationally_equal():
    account = compile_text(ACCOUNT)
    env = ModuleEnv([("account", account), ("record", compile_text(RECORD))])
    text = "(module (imports (r (record account))) (base (define (greet x) (list r:name x)) (define v 3)))"
    assert observationally_equal(compile_text(text, env), compile_text(text, env))


def test_different_definitions_are_distinguished():
    left = compile_text("(module (imports) (base (define (f x) (+ x 1))))")
    right = compile_text("(module (imports) (base (define (f x) (+ x 2))))")
    assert not observationally_equal(left, right)


def test_different_transformations_are_distinguished():
    assert observationally_equal(compile_text(IDENTITY), compile_text(IDENTITY))
    other = compile_text("(module (imports) (transformation (lambda (m) '(module (imports) (model other)))))")
    assert not observationally_equal(compile_text(IDENTITY), other)
    assert not observationally_equal(compile_text(IDENTITY), compile_text(ACCOUNT))


def test_compiled_variants():
    assert isinstance(compile_text(IDENTITY), CTrans)
    assert isinstance(compile_text("(module (imports) (base (define v 1)))"), CBase)
