"""コンパイル結果が宣言済み依存だけで決まることのランダム検査

ランダムな非循環ワークスペース（モデル・ベース・変換とその適用）を作り、
環境に余分な名前があっても、使わない名前を消しても結果が変わらないことを確かめます。
"""

from hypothesis import given, settings
from hypothesis import strategies as st

from modlock.core import ModuleEnv, compile_module, deps, observationally_equal, parse_module
from modlock.sexpr import parse_sexpr

KINDS = ("model", "base", "wrap", "make-base")
TRANSFORMATION_KINDS = ("wrap", "make-base")


def module_text(index: int, kind: str, imports: list[tuple[str, str, str | None]]) -> str:
    """(ローカル名, インポート式, 種類) の並びからモジュールのソースを作る"""
    header = " ".join(f"({local} {target})" for local, target, _ in imports)
    if kind == "model":
        body = f"(model (node {index}))"
    elif kind == "base":
        total = " ".join(["v", *(f"{local}:v" for local, _, k in imports if k == "base")])
        body = f"(base (define v {index}) (define w (+ {total})) (define (f x) (+ x w)))"
    elif kind == "wrap":
        body = (
            "(transformation (lambda (m) "
            f"`(module (imports (src current-arg-1)) (model (wrapped {index} ,(car (get-body m)))))))"
        )
    else:
        body = f"(transformation (lambda (m) '(module (imports) (base (define v {index})))))"
    return f"(module (imports {header}) {body})"


@st.composite
def workspaces(draw) -> list[str]:
    size = draw(st.integers(min_value=1, max_value=6))
    kinds: list[str] = []
    texts: list[str] = []
    for index in range(size):
        kind = draw(st.sampled_from(KINDS))
        imports: list[tuple[str, str, str | None]] = []
        if index:
            for j in draw(st.lists(st.integers(0, index - 1), unique=True, max_size=3)):
                imports.append((f"l{j}", f"m{j}", kinds[j]))
            transformations = [j for j in range(index) if kinds[j] in TRANSFORMATION_KINDS]
            if transformations and draw(st.booleans()):
                t = draw(st.sampled_from(transformations))
                a = draw(st.integers(0, index - 1))
                imports.append(("g", f"(m{t} m{a})", None))
        kinds.append(kind)
        texts.append(module_text(index, kind, imports))
    return texts


def compile_all(texts: list[str]) -> dict:
    """各モジュールを宣言済み依存だけの環境でコンパイルする"""
    compiled: dict = {}
    for index, text in enumerate(texts):
        m = parse_module(parse_sexpr(text))
        env = ModuleEnv((name, compiled[name]) for name in dict.fromkeys(deps(m)))
        compiled[f"m{index}"] = compile_module(env, m)
    return compiled


class RecordingModuleEnv(ModuleEnv):
    """引かれた名前を記録する環境"""

    def __init__(self, entries=()) -> None:
        super().__init__(entries)
        self.looked_up: list[str] = []

    def lookup(self, name: str):
        self.looked_up.append(name)
        return super().lookup(name)


@settings(max_examples=500, deadline=None)
@given(workspaces(), st.data())
def test_extra_bindings_do_not_change_the_result(texts, data):
    compiled = compile_all(texts)
    m = parse_module(parse_sexpr(texts[data.draw(st.integers(0, len(texts) - 1))]))
    needed = set(deps(m))
    minimal = ModuleEnv((name, compiled[name]) for name in sorted(needed))
    junk_names = [name for name in compiled if name not in needed] + ["junk", "current-trans", "current-arg-1"]
    junk = [(name, data.draw(st.sampled_from(list(compiled.values())))) for name in junk_names]
    larger = ModuleEnv(data.draw(st.permutations([*minimal.entries(), *junk])))
    assert observationally_equal(compile_module(minimal, m), compile_module(larger, m))


@settings(max_examples=500, deadline=None)
@given(workspaces(), st.data())
def test_removing_an_unused_name_does_not_change_the_result(texts, data):
    compiled = compile_all(texts)
    m = parse_module(parse_sexpr(texts[data.draw(st.integers(0, len(texts) - 1))]))
    full = ModuleEnv(compiled.items())
    unused = [name for name in full.names() if name not in deps(m)] + ["absent"]
    name = data.draw(st.sampled_from(unused))
    assert observationally_equal(compile_module(full, m), compile_module(full.without(name), m))


@settings(max_examples=300, deadline=None)
@given(workspaces())
def test_only_declared_dependencies_are_looked_up_in_the_callers_environment(texts):
    compiled = compile_all(texts)
    for index, text in enumerate(texts):
        m = parse_module(parse_sexpr(text))
        env = RecordingModuleEnv(compiled.items())
        compile_module(env, m)
        assert set(env.looked_up) == set(deps(m)), f"m{index}"
