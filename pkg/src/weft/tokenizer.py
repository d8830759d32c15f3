"""Incremental, suspendable HTML tokenizer.

The state machine is data-driven: a rule table maps (state, character class)
to an action list and a successor state.  The machine can pause at any point
(NeedMoreInput) and resume when more input is fed, and script-written text can
be spliced at the insertion point between two tokens.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from enum import IntEnum

from .errors import DoubleEnd, FedAfterEnd, InsertAfterEnd
from .tokens import Character, Comment, Doctype, EndOfStream, EndTag, StartTag, Token


class State(IntEnum):
    DATA = 0
    TAG_OPEN = 1
    END_TAG_OPEN = 2
    TAG_NAME = 3
    BEFORE_ATTRIBUTE_NAME = 4
    ATTRIBUTE_NAME = 5
    AFTER_ATTRIBUTE_NAME = 6
    BEFORE_ATTRIBUTE_VALUE = 7
    ATTRIBUTE_VALUE_DOUBLE_QUOTED = 8
    ATTRIBUTE_VALUE_SINGLE_QUOTED = 9
    ATTRIBUTE_VALUE_UNQUOTED = 10
    AFTER_ATTRIBUTE_VALUE_QUOTED = 11
    SELF_CLOSING_START_TAG = 12
    MARKUP_DECLARATION_OPEN = 13
    COMMENT_START = 14
    COMMENT_BODY = 15
    COMMENT_END = 16
    CHARACTER_REFERENCE = 17
    SCRIPT_DATA = 18
    SCRIPT_DATA_END_TAG_OPEN = 19
    SCRIPT_DATA_END_TAG_NAME = 20


class CharClass(IntEnum):
    WS = 0
    LT = 1
    GT = 2
    SLASH = 3
    EQ = 4
    AMP = 5
    BANG = 6
    DASH = 7
    DQUOTE = 8
    SQUOTE = 9
    HASH = 10
    SEMI = 11
    ALPHA = 12
    DIGIT = 13
    OTHER = 14
    EOF = 15  # pseudo-class used when the ended stream runs dry


_CLASS_OF = {
    "\t": CharClass.WS, "\n": CharClass.WS, "\f": CharClass.WS,
    "\r": CharClass.WS, " ": CharClass.WS,
    "<": CharClass.LT, ">": CharClass.GT, "/": CharClass.SLASH,
    "=": CharClass.EQ, "&": CharClass.AMP, "!": CharClass.BANG,
    "-": CharClass.DASH, '"': CharClass.DQUOTE, "'": CharClass.SQUOTE,
    "#": CharClass.HASH, ";": CharClass.SEMI,
}
for _c in "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ":
    _CLASS_OF[_c] = CharClass.ALPHA
for _c in "0123456789":
    _CLASS_OF[_c] = CharClass.DIGIT


def classify(ch: str) -> CharClass:
    return _CLASS_OF.get(ch, CharClass.OTHER)


NAMED_REFERENCES = {"amp": "&", "lt": "<", "gt": ">", "quot": '"', "apos": "'"}


@dataclass(frozen=True)
class NeedMoreInput:
    pass


@dataclass(frozen=True)
class Finished:
    pass


NEED_MORE_INPUT = NeedMoreInput()
FINISHED = Finished()

StepResult = Token | NeedMoreInput | Finished


class InputStream:
    """Character stream with append-only feeding and insertion-point splicing.

    Consumption never skips characters: total consumed + pending always equals
    total fed + total inserted.
    """

    def __init__(self):
        self._buf = ""
        self._pos = 0
        self._base = 0          # absolute offset of _buf[0]
        self._mark = None       # absolute insertion point, advances past splices
        self.ended = False
        self.total_fed = 0
        self.total_inserted = 0

    @property
    def total_consumed(self) -> int:
        return self._base + self._pos

    @property
    def pending_count(self) -> int:
        return len(self._buf) - self._pos

    def feed(self, chunk: str) -> None:
        if self.ended:
            raise FedAfterEnd("cannot feed an ended stream")
        if chunk:
            self._buf += chunk
            self.total_fed += len(chunk)

    def insert(self, text: str) -> None:
        """Splice script-written text at the insertion point.

        The insertion point starts at the current consumption position and
        advances past each splice, so consecutive writes compose in order
        ahead of not-yet-consumed raw input.
        """
        if self.ended:
            raise InsertAfterEnd("cannot insert into an ended stream")
        if self._mark is None or self._mark < self.total_consumed:
            self._mark = self.total_consumed
        if text:
            i = self._mark - self._base
            self._buf = self._buf[:i] + text + self._buf[i:]
            self.total_inserted += len(text)
        self._mark += len(text)

    def end(self) -> None:
        if self.ended:
            raise DoubleEnd("stream already ended")
        self.ended = True

    def next_char(self):
        if self._pos >= len(self._buf):
            return None
        ch = self._buf[self._pos]
        self._pos += 1
        if self._pos > 8192 and self._pos * 2 > len(self._buf):
            self._base += self._pos
            self._buf = self._buf[self._pos:]
            self._pos = 0
        return ch

    def take_run(self, stops: str) -> str:
        """Consume and return the maximal prefix containing none of `stops`."""
        buf, pos = self._buf, self._pos
        end = len(buf)
        cut = end
        for s in stops:
            i = buf.find(s, pos)
            if i != -1 and i < cut:
                cut = i
        run = buf[pos:cut]
        self._pos = cut
        return run

    def pending(self) -> str:
        """Copy of the not-yet-consumed input (for speculative scans)."""
        return self._buf[self._pos:]


# ---------------------------------------------------------------------------
# Rule table.  Actions are module-level functions f(machine, ch); a rule's
# successor state is applied before its actions run so an action may override
# it (tag emission switching to script data, flushes that reconsume, ...).
# ---------------------------------------------------------------------------

def _a_emit_char(m, ch):
    m._emit(Character(ch))


def _a_begin_tag_open(m, ch):
    m._raw = ["<"]


def _a_raw_only(m, ch):
    pass  # character already captured in the raw buffer


def _a_abort_tag_open(m, ch):
    # "<" followed by something that cannot start a tag: literal text.
    m._emit(Character("<"))
    m._raw = None
    m._reconsume_in(ch, State.DATA)


def _a_drop_empty_end_tag(m, ch):
    m._raw = None  # "</>" produces nothing


def _a_start_start_tag(m, ch):
    m._tag_kind = "start"
    m._tag_name = [ch.lower()]
    m._tag_attrs = []
    m._tag_self_closing = False
    m._attr_name = None
    m._attr_value = None


def _a_start_end_tag(m, ch):
    _a_start_start_tag(m, ch)
    m._tag_kind = "end"


def _a_tag_name_append(m, ch):
    m._tag_name.append(ch.lower())


def _a_attr_name_start(m, ch):
    m._commit_attr()
    m._attr_name = [ch.lower()]
    m._attr_value = []


def _a_attr_name_append(m, ch):
    m._attr_name.append(ch.lower())


def _a_attr_value_append(m, ch):
    m._attr_value.append(ch)


def _a_commit_attr(m, ch):
    m._commit_attr()


def _a_set_self_closing(m, ch):
    m._tag_self_closing = True


def _a_emit_tag(m, ch):
    m._emit_tag()


def _a_begin_mdo(m, ch):
    m._mdo = []


def _a_begin_bogus_from_end_tag(m, ch):
    m._mdo = [ch]


def _a_mdo_append(m, ch):
    m._mdo.append(ch)


def _a_mdo_dash(m, ch):
    if m._mdo == ["-"]:
        m._comment = []
        m._comment_dashes = 0
        m.state = State.COMMENT_START
    else:
        m._mdo.append("-")


def _a_mdo_finish(m, ch):
    m._finish_mdo()


def _a_comment_append(m, ch):
    m._comment.append(ch)


def _a_comment_dash(m, ch):
    m._comment_dashes = 1


def _a_comment_more_dash(m, ch):
    m._comment_dashes += 1


def _a_comment_end_other(m, ch):
    # the dashes were not a terminator; they belong to the body
    m._comment.append("-" * m._comment_dashes)
    m._comment.append(ch)
    m._comment_dashes = 0


def _a_comment_end_gt(m, ch):
    if m._comment_dashes >= 2:
        text = "".join(m._comment) + "-" * (m._comment_dashes - 2)
        m._emit(Comment(text))
        m._raw = None
        m._comment = None
        m.state = State.DATA
    else:
        _a_comment_end_other(m, ch)
        m.state = State.COMMENT_BODY


def _a_comment_empty(m, ch):
    m._emit(Comment(""))
    m._raw = None
    m._comment = None


def _make_begin_charref(return_state):
    def act(m, ch):
        m._ref_buf = []
        m._ref_numeric = False
        m._ref_return = return_state
    return act


def _a_charref_append(m, ch):
    m._ref_buf.append(ch)


def _a_charref_hash(m, ch):
    if m._ref_numeric or m._ref_buf:
        m._flush_charref_verbatim()
        m._reconsume_in(ch, m._ref_return)
    else:
        m._ref_numeric = True


def _a_charref_amp(m, ch):
    # "&a&lt;": the first reference is dead; restart with the new ampersand.
    m._flush_charref_verbatim()
    m._ref_buf = []
    m._ref_numeric = False


def _a_charref_other(m, ch):
    m._flush_charref_verbatim()
    m._reconsume_in(ch, m._ref_return)


def _a_charref_finish(m, ch):
    m._finish_charref()


def _a_begin_script_lt(m, ch):
    m._raw = ["<"]


def _a_script_lt_abort(m, ch):
    m._emit(Character("<"))
    m._raw = None
    m._reconsume_in(ch, State.SCRIPT_DATA)


def _a_script_end_tag_begin(m, ch):
    m._script_end_buf = []


def _a_script_end_append(m, ch):
    m._script_end_buf.append(ch.lower())


def _a_script_end_abort(m, ch):
    m._flush_script_end_buf()
    m._reconsume_in(ch, State.SCRIPT_DATA)


def _a_script_end_gt(m, ch):
    if "".join(m._script_end_buf) == "script":
        m._emit(EndTag("script"))
        m._raw = None
        m._script_end_buf = None
        m.state = State.DATA
    else:
        m._flush_script_end_buf()
        m._reconsume_in(ch, State.SCRIPT_DATA)


# EOF recovery actions (decision: never abort; re-emit partial constructs).

def _a_eof_plain(m, ch):
    m._finish_stream()


def _a_eof_flush_raw(m, ch):
    for c in m._raw or []:
        m._emit(Character(c))
    m._raw = None
    m._finish_stream()


def _a_eof_mdo(m, ch):
    m._finish_mdo()
    m._finish_stream()


def _a_eof_comment(m, ch):
    m._emit(Comment("".join(m._comment)))
    m._finish_stream()


def _a_eof_charref(m, ch):
    if m._ref_return == State.DATA:
        m._flush_charref_verbatim()
        m._finish_stream()
    else:
        _a_eof_flush_raw(m, ch)


Rule = tuple  # (actions tuple, next state or None to stay)

_ALL_CLASSES = list(CharClass)
_TABLE: dict[tuple[State, CharClass], Rule] = {}


def _rule(state, classes, actions, to=None):
    for c in classes:
        _TABLE[(state, c)] = (tuple(actions), to)


def _default(state, actions, to=None):
    for c in _ALL_CLASSES:
        if c is not CharClass.EOF and (state, c) not in _TABLE:
            _TABLE[(state, c)] = (tuple(actions), to)


CC = CharClass

_rule(State.DATA, [CC.LT], [_a_begin_tag_open], State.TAG_OPEN)
_rule(State.DATA, [CC.AMP], [_make_begin_charref(State.DATA)], State.CHARACTER_REFERENCE)
_rule(State.DATA, [CC.EOF], [_a_eof_plain])
_default(State.DATA, [_a_emit_char])

_rule(State.TAG_OPEN, [CC.ALPHA], [_a_start_start_tag], State.TAG_NAME)
_rule(State.TAG_OPEN, [CC.SLASH], [_a_raw_only], State.END_TAG_OPEN)
_rule(State.TAG_OPEN, [CC.BANG], [_a_begin_mdo], State.MARKUP_DECLARATION_OPEN)
_rule(State.TAG_OPEN, [CC.EOF], [_a_eof_flush_raw])
_default(State.TAG_OPEN, [_a_abort_tag_open])

_rule(State.END_TAG_OPEN, [CC.ALPHA], [_a_start_end_tag], State.TAG_NAME)
_rule(State.END_TAG_OPEN, [CC.GT], [_a_drop_empty_end_tag], State.DATA)
_rule(State.END_TAG_OPEN, [CC.EOF], [_a_eof_flush_raw])
_default(State.END_TAG_OPEN, [_a_begin_bogus_from_end_tag], State.MARKUP_DECLARATION_OPEN)

_rule(State.TAG_NAME, [CC.WS], [_a_raw_only], State.BEFORE_ATTRIBUTE_NAME)
_rule(State.TAG_NAME, [CC.SLASH], [_a_raw_only], State.SELF_CLOSING_START_TAG)
_rule(State.TAG_NAME, [CC.GT], [_a_emit_tag], State.DATA)
_rule(State.TAG_NAME, [CC.EOF], [_a_eof_flush_raw])
_default(State.TAG_NAME, [_a_tag_name_append])

_rule(State.BEFORE_ATTRIBUTE_NAME, [CC.WS], [_a_raw_only])
_rule(State.BEFORE_ATTRIBUTE_NAME, [CC.SLASH], [_a_raw_only], State.SELF_CLOSING_START_TAG)
_rule(State.BEFORE_ATTRIBUTE_NAME, [CC.GT], [_a_emit_tag], State.DATA)
_rule(State.BEFORE_ATTRIBUTE_NAME, [CC.EOF], [_a_eof_flush_raw])
_default(State.BEFORE_ATTRIBUTE_NAME, [_a_attr_name_start], State.ATTRIBUTE_NAME)

_rule(State.ATTRIBUTE_NAME, [CC.WS], [_a_raw_only], State.AFTER_ATTRIBUTE_NAME)
_rule(State.ATTRIBUTE_NAME, [CC.SLASH], [_a_raw_only], State.SELF_CLOSING_START_TAG)
_rule(State.ATTRIBUTE_NAME, [CC.EQ], [_a_raw_only], State.BEFORE_ATTRIBUTE_VALUE)
_rule(State.ATTRIBUTE_NAME, [CC.GT], [_a_emit_tag], State.DATA)
_rule(State.ATTRIBUTE_NAME, [CC.EOF], [_a_eof_flush_raw])
_default(State.ATTRIBUTE_NAME, [_a_attr_name_append])

_rule(State.AFTER_ATTRIBUTE_NAME, [CC.WS], [_a_raw_only])
_rule(State.AFTER_ATTRIBUTE_NAME, [CC.SLASH], [_a_raw_only], State.SELF_CLOSING_START_TAG)
_rule(State.AFTER_ATTRIBUTE_NAME, [CC.EQ], [_a_raw_only], State.BEFORE_ATTRIBUTE_VALUE)
_rule(State.AFTER_ATTRIBUTE_NAME, [CC.GT], [_a_emit_tag], State.DATA)
_rule(State.AFTER_ATTRIBUTE_NAME, [CC.EOF], [_a_eof_flush_raw])
_default(State.AFTER_ATTRIBUTE_NAME, [_a_attr_name_start], State.ATTRIBUTE_NAME)

_rule(State.BEFORE_ATTRIBUTE_VALUE, [CC.WS], [_a_raw_only])
_rule(State.BEFORE_ATTRIBUTE_VALUE, [CC.DQUOTE], [_a_raw_only], State.ATTRIBUTE_VALUE_DOUBLE_QUOTED)
_rule(State.BEFORE_ATTRIBUTE_VALUE, [CC.SQUOTE], [_a_raw_only], State.ATTRIBUTE_VALUE_SINGLE_QUOTED)
_rule(State.BEFORE_ATTRIBUTE_VALUE, [CC.GT], [_a_emit_tag], State.DATA)
_rule(State.BEFORE_ATTRIBUTE_VALUE, [CC.EOF], [_a_eof_flush_raw])


def _a_reconsume_unquoted(m, ch):
    m._reconsume_in(ch, State.ATTRIBUTE_VALUE_UNQUOTED)


_default(State.BEFORE_ATTRIBUTE_VALUE, [_a_reconsume_unquoted])

_rule(State.ATTRIBUTE_VALUE_DOUBLE_QUOTED, [CC.DQUOTE], [_a_commit_attr], State.AFTER_ATTRIBUTE_VALUE_QUOTED)
_rule(State.ATTRIBUTE_VALUE_DOUBLE_QUOTED, [CC.AMP],
      [_make_begin_charref(State.ATTRIBUTE_VALUE_DOUBLE_QUOTED)], State.CHARACTER_REFERENCE)
_rule(State.ATTRIBUTE_VALUE_DOUBLE_QUOTED, [CC.EOF], [_a_eof_flush_raw])
_default(State.ATTRIBUTE_VALUE_DOUBLE_QUOTED, [_a_attr_value_append])

_rule(State.ATTRIBUTE_VALUE_SINGLE_QUOTED, [CC.SQUOTE], [_a_commit_attr], State.AFTER_ATTRIBUTE_VALUE_QUOTED)
_rule(State.ATTRIBUTE_VALUE_SINGLE_QUOTED, [CC.AMP],
      [_make_begin_charref(State.ATTRIBUTE_VALUE_SINGLE_QUOTED)], State.CHARACTER_REFERENCE)
_rule(State.ATTRIBUTE_VALUE_SINGLE_QUOTED, [CC.EOF], [_a_eof_flush_raw])
_default(State.ATTRIBUTE_VALUE_SINGLE_QUOTED, [_a_attr_value_append])

_rule(State.ATTRIBUTE_VALUE_UNQUOTED, [CC.WS], [_a_commit_attr], State.BEFORE_ATTRIBUTE_NAME)
_rule(State.ATTRIBUTE_VALUE_UNQUOTED, [CC.GT], [_a_emit_tag], State.DATA)
_rule(State.ATTRIBUTE_VALUE_UNQUOTED, [CC.AMP],
      [_make_begin_charref(State.ATTRIBUTE_VALUE_UNQUOTED)], State.CHARACTER_REFERENCE)
_rule(State.ATTRIBUTE_VALUE_UNQUOTED, [CC.EOF], [_a_eof_flush_raw])
_default(State.ATTRIBUTE_VALUE_UNQUOTED, [_a_attr_value_append])


def _a_reconsume_before_attr_name(m, ch):
    m._reconsume_in(ch, State.BEFORE_ATTRIBUTE_NAME)


_rule(State.AFTER_ATTRIBUTE_VALUE_QUOTED, [CC.WS], [_a_raw_only], State.BEFORE_ATTRIBUTE_NAME)
_rule(State.AFTER_ATTRIBUTE_VALUE_QUOTED, [CC.SLASH], [_a_raw_only], State.SELF_CLOSING_START_TAG)
_rule(State.AFTER_ATTRIBUTE_VALUE_QUOTED, [CC.GT], [_a_emit_tag], State.DATA)
_rule(State.AFTER_ATTRIBUTE_VALUE_QUOTED, [CC.EOF], [_a_eof_flush_raw])
_default(State.AFTER_ATTRIBUTE_VALUE_QUOTED, [_a_reconsume_before_attr_name])

_rule(State.SELF_CLOSING_START_TAG, [CC.GT], [_a_set_self_closing, _a_emit_tag], State.DATA)
_rule(State.SELF_CLOSING_START_TAG, [CC.EOF], [_a_eof_flush_raw])
_default(State.SELF_CLOSING_START_TAG, [_a_reconsume_before_attr_name])

_rule(State.MARKUP_DECLARATION_OPEN, [CC.DASH], [_a_mdo_dash])
_rule(State.MARKUP_DECLARATION_OPEN, [CC.GT], [_a_mdo_finish], State.DATA)
_rule(State.MARKUP_DECLARATION_OPEN, [CC.EOF], [_a_eof_mdo])
_default(State.MARKUP_DECLARATION_OPEN, [_a_mdo_append])

_rule(State.COMMENT_START, [CC.DASH], [_a_comment_dash], State.COMMENT_END)
_rule(State.COMMENT_START, [CC.GT], [_a_comment_empty], State.DATA)
_rule(State.COMMENT_START, [CC.EOF], [_a_eof_comment])
_default(State.COMMENT_START, [_a_comment_append], State.COMMENT_BODY)

_rule(State.COMMENT_BODY, [CC.DASH], [_a_comment_dash], State.COMMENT_END)
_rule(State.COMMENT_BODY, [CC.EOF], [_a_eof_comment])
_default(State.COMMENT_BODY, [_a_comment_append])

_rule(State.COMMENT_END, [CC.DASH], [_a_comment_more_dash])
_rule(State.COMMENT_END, [CC.GT], [_a_comment_end_gt])
_rule(State.COMMENT_END, [CC.EOF], [_a_eof_comment])
_default(State.COMMENT_END, [_a_comment_end_other], State.COMMENT_BODY)

_rule(State.CHARACTER_REFERENCE, [CC.ALPHA, CC.DIGIT], [_a_charref_append])
_rule(State.CHARACTER_REFERENCE, [CC.HASH], [_a_charref_hash])
_rule(State.CHARACTER_REFERENCE, [CC.SEMI], [_a_charref_finish])
_rule(State.CHARACTER_REFERENCE, [CC.AMP], [_a_charref_amp])
_rule(State.CHARACTER_REFERENCE, [CC.EOF], [_a_eof_charref])
_default(State.CHARACTER_REFERENCE, [_a_charref_other])

_rule(State.SCRIPT_DATA, [CC.LT], [_a_begin_script_lt], State.SCRIPT_DATA_END_TAG_OPEN)
_rule(State.SCRIPT_DATA, [CC.EOF], [_a_eof_plain])
_default(State.SCRIPT_DATA, [_a_emit_char])

_rule(State.SCRIPT_DATA_END_TAG_OPEN, [CC.SLASH], [_a_script_end_tag_begin], State.SCRIPT_DATA_END_TAG_NAME)
_rule(State.SCRIPT_DATA_END_TAG_OPEN, [CC.EOF], [_a_eof_flush_raw])
_default(State.SCRIPT_DATA_END_TAG_OPEN, [_a_script_lt_abort])

_rule(State.SCRIPT_DATA_END_TAG_NAME, [CC.ALPHA], [_a_script_end_append])
_rule(State.SCRIPT_DATA_END_TAG_NAME, [CC.GT], [_a_script_end_gt])
_rule(State.SCRIPT_DATA_END_TAG_NAME, [CC.EOF], [_a_eof_flush_raw])
_default(State.SCRIPT_DATA_END_TAG_NAME, [_a_script_end_abort])

RULE_TABLE = _TABLE


class TokenizerMachine:
    """Suspendable tokenizer over a reinjectable input stream.

    The machine is a pure function of its state snapshot and remaining input:
    deep-copying a paused machine and resuming both copies yields identical
    token streams.
    """

    def __init__(self):
        self.state = State.DATA
        self.input = InputStream()
        self._out = deque()
        self._finished = False
        self._recon = None       # one pushed-back character
        self._raw = None         # raw lexeme since "<", for EOF recovery
        self._tag_kind = None
        self._tag_name = None
        self._tag_attrs = None
        self._tag_self_closing = False
        self._attr_name = None
        self._attr_value = None
        self._mdo = None
        self._comment = None
        self._comment_dashes = 0
        self._ref_buf = None
        self._ref_numeric = False
        self._ref_return = State.DATA
        self._script_end_buf = None

    # -- feeding ---------------------------------------------------------

    def feed(self, chunk: str) -> None:
        self.input.feed(chunk)

    def insert_at_insertion_point(self, text: str) -> None:
        self.input.insert(text)

    def end_stream(self) -> None:
        self.input.end()

    # -- stepping --------------------------------------------------------

    def next_token(self) -> StepResult:
        while True:
            if self._out:
                return self._out.popleft()
            if self._finished:
                return FINISHED
            if self._recon is None:
                if self.state == State.DATA:
                    run = self.input.take_run("<&")
                    if run:
                        self._out.extend(Character(c) for c in run)
                        continue
                elif self.state == State.SCRIPT_DATA:
                    run = self.input.take_run("<")
                    if run:
                        self._out.extend(Character(c) for c in run)
                        continue
                ch = self.input.next_char()
                if ch is None:
                    if not self.input.ended:
                        return NEED_MORE_INPUT
                    actions, _ = RULE_TABLE[(self.state, CharClass.EOF)]
                    for act in actions:
                        act(self, "")
                    continue
                if self._raw is not None:
                    self._raw.append(ch)
            else:
                ch = self._recon
                self._recon = None
            actions, nxt = RULE_TABLE[(self.state, classify(ch))]
            if nxt is not None:
                self.state = nxt
            for act in actions:
                act(self, ch)

    def tokens_until_blocked(self) -> list:
        """Drain: collect emitted tokens until NeedMoreInput or Finished."""
        out = []
        while True:
            r = self.next_token()
            if r is NEED_MORE_INPUT or r is FINISHED:
                return out
            out.append(r)

    def pending_input(self) -> str:
        return self.input.pending()

    # -- internals used by rule actions -----------------------------------

    def _emit(self, token):
        self._out.append(token)

    def _reconsume_in(self, ch, state):
        self._recon = ch
        self.state = state

    def _commit_attr(self):
        if self._attr_name is None:
            return
        name = "".join(self._attr_name)
        value = "".join(self._attr_value)
        if name and not any(n == name for n, _ in self._tag_attrs):
            self._tag_attrs.append((name, value))
        self._attr_name = None
        self._attr_value = None

    def _emit_tag(self):
        self._commit_attr()
        name = "".join(self._tag_name)
        if self._tag_kind == "start":
            self._emit(StartTag(name, dict(self._tag_attrs), self._tag_self_closing))
            if name == "script" and not self._tag_self_closing:
                self.state = State.SCRIPT_DATA
        else:
            self._emit(EndTag(name))  # attributes on end tags are dropped
        self._raw = None
        self._tag_kind = None

    def _finish_mdo(self):
        text = "".join(self._mdo)
        if text[:7].lower() == "doctype":
            self._emit(Doctype(text[7:].strip().lower()))
        else:
            self._emit(Comment(text))
        self._mdo = None
        self._raw = None

    def _charref_verbatim_text(self):
        return "&" + ("#" if self._ref_numeric else "") + "".join(self._ref_buf)

    def _flush_charref_text(self, text):
        if self._ref_return == State.DATA:
            for c in text:
                self._emit(Character(c))
        else:
            self._attr_value.extend(text)

    def _flush_charref_verbatim(self):
        self._flush_charref_text(self._charref_verbatim_text())

    def _finish_charref(self):
        buf = "".join(self._ref_buf)
        resolved = None
        if self._ref_numeric:
            try:
                code = int(buf[1:], 16) if buf[:1] in ("x", "X") else int(buf, 10)
            except ValueError:
                code = -1
            if 0 < code <= 0x10FFFF and not 0xD800 <= code <= 0xDFFF:
                resolved = chr(code)
        else:
            resolved = NAMED_REFERENCES.get(buf)
        if resolved is None:
            self._flush_charref_text(self._charref_verbatim_text() + ";")
        else:
            self._flush_charref_text(resolved)
        self.state = self._ref_return
        self._ref_buf = None

    def _flush_script_end_buf(self):
        self._emit(Character("<"))
        self._emit(Character("/"))
        for c in self._script_end_buf:
            self._emit(Character(c))
        self._raw = None
        self._script_end_buf = None

    def _finish_stream(self):
        self._emit(EndOfStream())
        self._finished = True


def tokenize(text: str) -> list:
    """Tokenize a complete document in one go (testing convenience)."""
    m = TokenizerMachine()
    m.feed(text)
    m.end_stream()
    return m.tokens_until_blocked()


# ---------------------------------------------------------------------------
# Speculative prefetch scanning.  Deliberately context-free: it ignores
# comments and quoting subtleties, so it may over-report (never under-report
# on well-formed markup outside comments).  It never touches machine state.
# ---------------------------------------------------------------------------

_PREFETCH_TAG = re.compile(r"<(img|script|link)\b([^>]*)", re.IGNORECASE)
_SRC_ATTR = re.compile(r"""\bsrc\s*=\s*(?:"([^"]*)"|'([^']*)'|([^\s>"']+))""", re.IGNORECASE)
_HREF_ATTR = re.compile(r"""\bhref\s*=\s*(?:"([^"]*)"|'([^']*)'|([^\s>"']+))""", re.IGNORECASE)


def scan_prefetch(pending: str) -> list[str]:
    """Forward-scan unconsumed input for resource URLs, in document order."""
    urls = []
    for tag in _PREFETCH_TAG.finditer(pending):
        attr_re = _HREF_ATTR if tag.group(1).lower() == "link" else _SRC_ATTR
        hit = attr_re.search(tag.group(2))
        if hit:
            url = next(g for g in hit.groups() if g is not None)
            if url:
                urls.append(url)
    return urls
