"""Reader and writer for the two-view specification language.

A source file declares server templates (services, states, actions) and, in
the agent view, agent templates; then server/agent variables; then an init
block binding template parameters and giving initial states and messages.
Parsing fully expands templates into a validated SystemModel.

Grammar notes: commas and semicolons between sections, actions, and init
items are optional separators; trailing commas are allowed; `#` starts a
line comment; a `variable: type` declaration whose variable equals its type
may be suppressed to the bare identifier; the init block may close with `}`
or `}.`.
"""

from dataclasses import dataclass, field

from .model import (Action, Message, ServerDecl, ServerState, SystemModel,
                    validate_model)

KEYWORDS = {"system", "server", "agent", "servers", "agents",
            "services", "states", "actions", "init"}

PUNCT = {"{", "}", "(", ")", ",", ";", ":", ".", "->"}


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int

    def __str__(self):
        return f"{self.line}:{self.column}"


class SpecError(Exception):
    """Base for all source-level errors; carries a source span."""

    def __init__(self, span: SourceSpan, message: str):
        super().__init__(f"{span}: {message}")
        self.span = span
        self.message = message


class SpecSyntaxError(SpecError):
    pass


class UnknownIdentifier(SpecError):
    pass


class ArityMismatch(SpecError):
    pass


class DuplicateName(SpecError):
    pass


class ConstraintViolation(SpecError):
    def __init__(self, span: SourceSpan, message: str,
                 diagnostics: list[str] | None = None):
        super().__init__(span, message)
        self.diagnostics = diagnostics or [message]


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | punctuation text | "eof"
    text: str
    span: SourceSpan


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            i += 1
            col += 1
        elif c == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif c.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            tokens.append(Token("ident", word, SourceSpan(line, col, j - i)))
            col += j - i
            i = j
        elif text.startswith("->", i):
            tokens.append(Token("->", "->", SourceSpan(line, col, 2)))
            i += 2
            col += 2
        elif c in "{}(),;:.":
            tokens.append(Token(c, c, SourceSpan(line, col, 1)))
            i += 1
            col += 1
        else:
            raise SpecSyntaxError(SourceSpan(line, col, 1),
                                  f"unexpected character {c!r}")
    tokens.append(Token("eof", "", SourceSpan(line, col, 0)))
    return tokens


# ---------------------------------------------------------------------------
# Raw syntax tree (template level, before instantiation)


@dataclass(frozen=True)
class Ref:
    """Dotted reference with 2 (x.y) or 3 (x.y.z) parts."""

    parts: tuple[str, ...]
    span: SourceSpan


@dataclass(frozen=True)
class ActionTemplate:
    in_msg: Ref
    in_state: Ref
    out_msg: Ref | None
    out_state: Ref
    span: SourceSpan


@dataclass
class TemplateDecl:
    kind: str  # "server" | "agent"
    name: str
    span: SourceSpan
    agent_params: list[tuple[str, str | None]] = field(default_factory=list)
    server_params: list[tuple[str, str | None]] = field(default_factory=list)
    services: list[str] = field(default_factory=list)
    states: list[str] = field(default_factory=list)
    actions: list[ActionTemplate] = field(default_factory=list)
    sections_seen: set = field(default_factory=set)


@dataclass(frozen=True)
class VarDecl:
    kind: str  # "server" | "agent"
    name: str
    type_name: str
    span: SourceSpan


@dataclass(frozen=True)
class InitItem:
    var: str
    args: tuple[str, ...]
    has_args: bool
    tail: tuple[str, ...]  # (value,) for servers, (server, service) for agents
    span: SourceSpan


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise SpecSyntaxError(tok.span,
                                  f"expected {what or kind!r}, got {tok.text or 'end of input'!r}")
        return self.next()

    def expect_word(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.text != word:
            raise SpecSyntaxError(tok.span,
                                  f"expected {word!r}, got {tok.text or 'end of input'!r}")
        return self.next()

    def at_word(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    def name(self, what: str = "identifier") -> Token:
        tok = self.expect("ident", what)
        if tok.text in KEYWORDS:
            raise SpecSyntaxError(tok.span,
                                  f"reserved word {tok.text!r} cannot name a {what}")
        return tok

    def skip_separators(self):
        while self.peek().kind in (",", ";"):
            self.next()

    # -- grammar ----------------------------------------------------------

    def parse_unit(self):
        self.expect_word("system")
        sys_name = self.name("system name")
        self.expect(";")
        templates: list[TemplateDecl] = []
        variables: list[VarDecl] = []
        inits: list[InitItem] = []
        init_span = None
        while True:
            self.skip_separators()
            tok = self.peek()
            if tok.kind == "eof":
                break
            if tok.kind != "ident":
                raise SpecSyntaxError(tok.span, f"unexpected {tok.text!r}")
            if tok.text in ("server", "agent"):
                templates.append(self.parse_template())
            elif tok.text in ("servers", "agents"):
                variables.extend(self.parse_var_decl())
            elif tok.text == "init":
                if init_span is not None:
                    raise DuplicateName(tok.span, "duplicate init block")
                init_span = self.next().span
                inits = self.parse_init()
            else:
                raise SpecSyntaxError(tok.span,
                                      f"expected a declaration, got {tok.text!r}")
        if init_span is None:
            raise SpecSyntaxError(self.peek().span, "missing init block")
        return sys_name, templates, variables, inits, init_span

    def parse_template(self) -> TemplateDecl:
        kw = self.next()
        self.expect(":")
        name = self.name(f"{kw.text} template name")
        tpl = TemplateDecl(kw.text, name.text, name.span)
        if self.peek().kind == "(":
            self.next()
            self.parse_params(tpl)
            self.expect(")")
        while True:
            self.skip_separators()
            if self.at_word("services"):
                self.parse_ident_section(tpl, "services")
            elif self.at_word("states"):
                self.parse_ident_section(tpl, "states")
            elif self.at_word("actions"):
                self.parse_actions_section(tpl)
            else:
                break
        return tpl

    def parse_params(self, tpl: TemplateDecl):
        seen = set()
        while self.peek().kind != ")":
            if self.at_word("agents"):
                group = tpl.agent_params
            elif self.at_word("servers"):
                group = tpl.server_params
            else:
                raise SpecSyntaxError(self.peek().span,
                                      "expected 'agents' or 'servers' parameter group")
            self.next()
            while True:
                tok = self.name("parameter")
                type_name = None
                if self.peek().kind == ":":
                    self.next()
                    type_name = self.name("parameter type").text
                if tok.text in seen:
                    raise DuplicateName(tok.span, f"duplicate parameter {tok.text}")
                seen.add(tok.text)
                group.append((tok.text, type_name))
                if self.peek().kind == ",":
                    self.next()
                    continue
                break
            if self.peek().kind == ";":
                self.next()

    def parse_ident_section(self, tpl: TemplateDecl, section: str):
        kw = self.next()
        if section in tpl.sections_seen:
            raise DuplicateName(kw.span,
                                f"duplicate {section} section in {tpl.name}")
        tpl.sections_seen.add(section)
        self.expect("{")
        names = []
        while self.peek().kind != "}":
            tok = self.name(section[:-1] + " name")
            if tok.text in names:
                raise DuplicateName(tok.span,
                                    f"duplicate {section[:-1]} {tok.text} in {tpl.name}")
            names.append(tok.text)
            self.skip_separators()
        self.expect("}")
        setattr(tpl, section, names)

    def parse_actions_section(self, tpl: TemplateDecl):
        kw = self.next()
        if "actions" in tpl.sections_seen:
            raise DuplicateName(kw.span, f"duplicate actions section in {tpl.name}")
        tpl.sections_seen.add("actions")
        self.expect("{")
        while True:
            self.skip_separators()
            if self.peek().kind == "}":
                break
            tpl.actions.append(self.parse_action())
        self.expect("}")

    def parse_action(self) -> ActionTemplate:
        open_tok = self.expect("{")
        in_msg = self.parse_ref(3, "input message")
        self.expect(",")
        in_state = self.parse_ref(2, "input state")
        self.skip_separators()
        self.expect("}")
        self.expect("->")
        self.expect("{")
        first = self.parse_ref(None, "action output")
        if self.peek().kind == ",":
            self.next()
            if self.peek().kind == "}":  # trailing comma: terminating form
                out_msg, out_state = None, first
            else:
                out_msg, out_state = first, self.parse_ref(2, "output state")
        else:
            out_msg, out_state = None, first
        if out_msg is None:
            if len(out_state.parts) != 2:
                raise SpecSyntaxError(out_state.span,
                                      "terminating action output must be server.value")
        else:
            if len(out_msg.parts) != 3:
                raise SpecSyntaxError(out_msg.span,
                                      "output message must be agent.server.service")
        self.skip_separators()
        self.expect("}")
        return ActionTemplate(in_msg, in_state, out_msg, out_state, open_tok.span)

    def parse_ref(self, arity: int | None, what: str) -> Ref:
        first = self.name(what)
        parts = [first.text]
        while self.peek().kind == ".":
            self.next()
            parts.append(self.name(what).text)
        if arity is not None and len(parts) != arity:
            raise SpecSyntaxError(first.span,
                                  f"{what} must have {arity} dotted parts, got {len(parts)}")
        if len(parts) not in (2, 3):
            raise SpecSyntaxError(first.span,
                                  f"{what} must have 2 or 3 dotted parts")
        return Ref(tuple(parts), first.span)

    def parse_var_decl(self) -> list[VarDecl]:
        kw = self.next()
        kind = "server" if kw.text == "servers" else "agent"
        out = []
        while True:
            tok = self.name(f"{kind} variable")
            type_name = tok.text
            if self.peek().kind == ":":
                self.next()
                type_name = self.name(f"{kind} type").text
            out.append(VarDecl(kind, tok.text, type_name, tok.span))
            if self.peek().kind == ",":
                self.next()
                continue
            break
        self.expect(";")
        return out

    def parse_init(self) -> list[InitItem]:
        self.expect("->")
        self.expect("{")
        items = []
        while True:
            self.skip_separators()
            if self.peek().kind == "}":
                break
            items.append(self.parse_init_item())
        self.expect("}")
        if self.peek().kind == ".":  # both `}` and `}.` close the block
            self.next()
        return items

    def parse_init_item(self) -> InitItem:
        var = self.name("variable")
        args: tuple[str, ...] = ()
        has_args = False
        if self.peek().kind == "(":
            has_args = True
            self.next()
            lst = []
            while self.peek().kind != ")":
                lst.append(self.name("argument").text)
                if self.peek().kind == ",":
                    self.next()
            self.expect(")")
            args = tuple(lst)
        self.expect(".")
        tail = [self.name("initial value").text]
        if self.peek().kind == ".":
            self.next()
            tail.append(self.name("initial service").text)
        return InitItem(var.text, args, has_args, tuple(tail), var.span)


# ---------------------------------------------------------------------------
# Instantiation: templates + variables + init -> SystemModel


def parse(text: str) -> tuple[SystemModel, str]:
    """Parse source into a validated model plus the view tag it used."""
    sys_name, templates, variables, inits, init_span = _Parser(text).parse_unit()

    view = "agent" if any(t.kind == "agent" for t in templates) else "server"
    tpl_by_name: dict[tuple[str, str], TemplateDecl] = {}
    for t in templates:
        key = (t.kind, t.name)
        if key in tpl_by_name:
            raise DuplicateName(t.span, f"duplicate {t.kind} template {t.name}")
        tpl_by_name[key] = t

    server_vars = [v for v in variables if v.kind == "server"]
    agent_vars = [v for v in variables if v.kind == "agent"]
    var_by_name: dict[tuple[str, str], VarDecl] = {}
    for v in variables:
        if (v.kind, v.name) in var_by_name:
            raise DuplicateName(v.span, f"duplicate {v.kind} variable {v.name}")
        var_by_name[(v.kind, v.name)] = v

    def template_of(v: VarDecl, required: bool) -> TemplateDecl | None:
        tpl = tpl_by_name.get((v.kind, v.type_name))
        if tpl is None and (required or v.type_name != v.name):
            raise UnknownIdentifier(v.span,
                                    f"no {v.kind} template named {v.type_name}")
        return tpl

    init_by_var: dict[str, InitItem] = {}
    for item in inits:
        if item.var in init_by_var:
            raise DuplicateName(item.span, f"duplicate init for {item.var}")
        kind = "server" if len(item.tail) == 1 else "agent"
        if (kind, item.var) not in var_by_name:
            raise UnknownIdentifier(item.span,
                                    f"init names unknown {kind} variable {item.var}")
        init_by_var[item.var] = item

    def binding(v: VarDecl, tpl: TemplateDecl | None,
                item: InitItem) -> dict[str, tuple[str, str]]:
        sigma: dict[str, tuple[str, str]] = {}
        formals = (list(tpl.agent_params) + list(tpl.server_params)) if tpl else []
        if len(item.args) != len(formals):
            raise ArityMismatch(item.span,
                                f"{v.name} takes {len(formals)} argument(s), got {len(item.args)}")
        n_agents = len(tpl.agent_params) if tpl else 0
        for i, ((formal, _ftype), actual) in enumerate(zip(formals, item.args)):
            want = "agent" if i < n_agents else "server"
            if (want, actual) not in var_by_name:
                raise UnknownIdentifier(item.span,
                                        f"{actual} is not a declared {want} variable")
            sigma[formal] = (want, actual)
        if tpl is not None:
            sigma[tpl.name] = (v.kind, v.name)
        return sigma

    def resolve(ref: Ref, pos: int, want: str,
                sigma: dict[str, tuple[str, str]]) -> str:
        name = ref.parts[pos]
        bound = sigma.get(name)
        if bound is None:
            raise UnknownIdentifier(
                ref.span,
                f"{name} does not resolve to a parameter or the template itself")
        kind, actual = bound
        if kind != want:
            raise UnknownIdentifier(ref.span, f"{name} is not a {want} parameter")
        return actual

    actions: list[tuple[Action, SourceSpan]] = []

    def expand(tpl: TemplateDecl, sigma: dict[str, str]):
        for at in tpl.actions:
            in_msg = Message(resolve(at.in_msg, 0, "agent", sigma),
                             resolve(at.in_msg, 1, "server", sigma),
                             at.in_msg.parts[2])
            in_state = ServerState(resolve(at.in_state, 0, "server", sigma),
                                   at.in_state.parts[1])
            out_state = ServerState(resolve(at.out_state, 0, "server", sigma),
                                    at.out_state.parts[1])
            out_msg = None
            if at.out_msg is not None:
                out_msg = Message(resolve(at.out_msg, 0, "agent", sigma),
                                  resolve(at.out_msg, 1, "server", sigma),
                                  at.out_msg.parts[2])
            actions.append((Action(in_msg, in_state, out_msg, out_state), at.span))

    server_decls = []
    initial_states = []
    for v in server_vars:
        tpl = template_of(v, required=True)
        server_decls.append(ServerDecl(v.name, tuple(tpl.states), tuple(tpl.services)))
        item = init_by_var.get(v.name)
        if item is None or len(item.tail) != 1:
            raise ConstraintViolation(init_span,
                                      f"server {v.name} has no initial state")
        sigma = binding(v, tpl, item)
        expand(tpl, sigma)
        initial_states.append((ServerState(v.name, item.tail[0]), item.span))

    initial_messages = []
    for v in agent_vars:
        tpl = template_of(v, required=False)
        item = init_by_var.get(v.name)
        if item is None or len(item.tail) != 2:
            raise ConstraintViolation(init_span,
                                      f"agent {v.name} without initial message")
        sigma = binding(v, tpl, item)
        if tpl is not None:
            expand(tpl, sigma)
        target = sigma.get(item.tail[0], ("server", item.tail[0]))[1]
        if ("server", target) not in var_by_name:
            raise UnknownIdentifier(item.span,
                                    f"{item.tail[0]} is not a declared server variable")
        initial_messages.append((Message(v.name, target, item.tail[1]), item.span))

    model = SystemModel(
        name=sys_name.text,
        servers=tuple(server_decls),
        agents=tuple(v.name for v in agent_vars),
        actions=tuple(a for a, _ in actions),
        initial_states=tuple(p for p, _ in initial_states),
        initial_messages=tuple(m for m, _ in initial_messages),
    )
    diagnostics = validate_model(model)
    if diagnostics:
        raise ConstraintViolation(_locate(diagnostics[0], actions,
                                          initial_states, initial_messages,
                                          init_span),
                                  diagnostics[0], diagnostics)
    return model, view


def _locate(diagnostic, actions, initial_states, initial_messages, fallback):
    """Best-effort span for a validation diagnostic."""
    squeezed = "".join(diagnostic.split())
    for a, span in actions:
        if "".join(a.label.split()) in squeezed:
            return span
    for p, span in initial_states:
        if f"initialstateof{p.server}" in squeezed:
            return span
    for m, span in initial_messages:
        if f"initialmessageof{m.agent}" in squeezed:
            return span
    return fallback


def parse_file(path) -> tuple[SystemModel, str]:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# ---------------------------------------------------------------------------
# Rendering


def _format_action(a: Action) -> str:
    lhs = f"{{{a.in_message.label}, {a.in_state.label}}}"
    if a.terminating:
        return f"{lhs} -> {{{a.out_state.label}}},"
    return f"{lhs} -> {{{a.out_message.label}, {a.out_state.label}}},"


def _server_params(model: SystemModel, server: str) -> tuple[list[str], list[str]]:
    """Agents and other servers a server's action block references."""
    agents, servers = [], []
    for a in model.actions:
        if a.in_state.server != server:
            continue
        if a.in_message.agent not in agents:
            agents.append(a.in_message.agent)
        if a.out_message is not None and a.out_message.server != server:
            if a.out_message.server not in servers:
                servers.append(a.out_message.server)
    agents.sort(key=model.agent_index)
    servers.sort(key=model.server_index)
    return agents, servers


def _agent_params(model: SystemModel, agent: str) -> list[str]:
    """Servers an agent's action block or initial message references."""
    servers = []
    for a in model.actions:
        if a.in_message.agent != agent:
            continue
        for s in (a.in_message.server, a.in_state.server,
                  None if a.out_message is None else a.out_message.server):
            if s is not None and s not in servers:
                servers.append(s)
    init = model.initial_messages[model.agent_index(agent)]
    if init.server not in servers:
        servers.append(init.server)
    servers.sort(key=model.server_index)
    return servers


def render(model: SystemModel, view: str) -> str:
    """Pretty-print a model in the requested view; re-parses to an equal model."""
    if view not in ("server", "agent"):
        raise ValueError(f"view must be 'server' or 'agent', not {view!r}")
    lines = [f"system {model.name};"]
    if view == "server":
        for s in model.servers:
            agents, servers = _server_params(model, s.name)
            groups = []
            if agents:
                groups.append("agents " + ", ".join(agents))
            if servers:
                groups.append("servers " + ", ".join(servers))
            head = f"server: {s.name}"
            if groups:
                head += " (" + "; ".join(groups) + ")"
            lines.append(head + ",")
            lines.append("services {" + ", ".join(s.services) + "},")
            lines.append("states {" + ", ".join(s.values) + "},")
            lines.append("actions {")
            for a in model.actions:
                if a.in_state.server == s.name:
                    lines.append(_format_action(a))
            lines.append("}")
        lines.append("servers " + ", ".join(s.name for s in model.servers) + ";")
        lines.append("agents " + ", ".join(model.agents) + ";")
        lines.append("init -> {")
        for s, p in zip(model.servers, model.initial_states):
            agents, servers = _server_params(model, s.name)
            args = ", ".join(agents + servers)
            call = f"{s.name}({args})" if args else s.name
            lines.append(f"{call}.{p.value},")
        for m in model.initial_messages:
            lines.append(f"{m.agent}.{m.server}.{m.service},")
        lines.append("}.")
    else:
        for s in model.servers:
            lines.append(f"server: {s.name},")
            lines.append("services {" + ", ".join(s.services) + "}")
            lines.append("states {" + ", ".join(s.values) + "};")
        for name in model.agents:
            params = _agent_params(model, name)
            head = f"agent: {name}"
            if params:
                head += " (servers " + ", ".join(f"{p}:{p}" for p in params) + ")"
            lines.append(head + ",")
            lines.append("actions {")
            for a in model.actions:
                if a.in_message.agent == name:
                    lines.append(_format_action(a))
            lines.append("};")
        lines.append("agents " + ", ".join(f"{a}:{a}" for a in model.agents) + ";")
        lines.append("servers " + ", ".join(f"{s.name}:{s.name}" for s in model.servers) + ";")
        lines.append("init -> {")
        for name, m in zip(model.agents, model.initial_messages):
            params = _agent_params(model, name)
            call = f"{name}({', '.join(params)})" if params else name
            lines.append(f"{call}.{m.server}.{m.service},")
        for p in model.initial_states:
            lines.append(f"{p.server}.{p.value},")
        lines.append("}.")
    return "\n".join(lines) + "\n"
