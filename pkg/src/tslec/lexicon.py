"""Emergent vocabularies: lazy symbol invention, encoding and decoding.

Each agent owns a :class:`Vocabulary` mapping concepts ``(intent, item, qty)``
to symbols of the form ``"@" + owner + hex(counter)``.  Listeners never see
a peer's vocabulary directly; they keep a :class:`ListenerModel` that is
filled in once a symbol has been used in a completed round.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional


class Intent(enum.IntEnum):
    DEMAND = 0
    OFFER = 1
    REQUEST = 2


MAX_QTY = 3


class Concept(NamedTuple):
    intent: Intent
    item: int
    qty: int


class Marker(NamedTuple):
    """Reserved non-concept vocabulary entry used to frame teachings."""

    name: str


STRATEGY_MARKER = Marker("STRATEGY")
END_MARKER = Marker("END")
RESERVED = (STRATEGY_MARKER, END_MARKER)


def concept_space(n_items: int) -> list[Concept]:
    return [
        Concept(intent, item, qty)
        for intent, item, qty in itertools.product(
            Intent, range(n_items), range(1, MAX_QTY + 1)
        )
    ]


def make_symbol(owner: int, counter: int) -> str:
    # globally unique only while owners are single decimal digits
    return f"@{owner}{counter:x}"


def parse_symbol(symbol: str, owner: int) -> tuple[int, int]:
    """Split a symbol into ``(owner, counter)``.

    The decimal owner and the hex counter share no separator, so the owner
    must be known to split the string unambiguously.
    """
    prefix = f"@{owner}"
    if not symbol.startswith(prefix) or len(symbol) == len(prefix):
        raise ValueError(f"{symbol!r} does not belong to agent {owner}")
    return owner, int(symbol[len(prefix):], 16)


@dataclass
class Vocabulary:
    owner: int
    map: dict = field(default_factory=dict)
    creation_order: list = field(default_factory=list)
    _inverse: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.map)

    def __contains__(self, entry) -> bool:
        return entry in self.map

    @property
    def concepts(self) -> list[Concept]:
        return [c for c in self.creation_order if isinstance(c, Concept)]

    def lookup(self, symbol: str):
        return self._inverse[symbol]

    def copy(self) -> "Vocabulary":
        return Vocabulary(
            self.owner, dict(self.map), list(self.creation_order), dict(self._inverse)
        )


@dataclass
class Message:
    sender: int
    symbols: list[str]


def encode(vocab: Vocabulary, concept) -> tuple[str, bool]:
    """Return the symbol for ``concept``, inventing one if it is new."""
    symbol = vocab.map.get(concept)
    if symbol is not None:
        return symbol, False
    symbol = make_symbol(vocab.owner, len(vocab.map))
    vocab.map[concept] = symbol
    vocab.creation_order.append(concept)
    vocab._inverse[symbol] = concept
    return symbol, True


def encode_message(vocab: Vocabulary, concepts: Iterable) -> tuple[Message, int]:
    """Encode a sequence of concepts; also returns how many symbols were new."""
    symbols = []
    created = 0
    for c in concepts:
        s, new = encode(vocab, c)
        symbols.append(s)
        created += new
    return Message(vocab.owner, symbols), created


def decode_true(sender_vocab: Vocabulary, message: Message) -> list:
    try:
        return [sender_vocab.lookup(s) for s in message.symbols]
    except KeyError as exc:
        raise ValueError(f"symbol {exc.args[0]!r} not in vocabulary of agent {sender_vocab.owner}") from None


@dataclass
class ListenerModel:
    """One listener's learned copy of every peer's vocabulary."""

    listener: int
    known: dict = field(default_factory=dict)  # sender -> {symbol: concept}

    def peer(self, sender: int) -> dict:
        return self.known.setdefault(sender, {})


def decode_observed(
    model: ListenerModel, message: Message
) -> tuple[list[Optional[object]], float]:
    known = model.known.get(message.sender, {})
    concepts = [known.get(s) for s in message.symbols]
    if not concepts:
        return concepts, 1.0
    hits = sum(c is not None for c in concepts)
    return concepts, hits / len(concepts)


def reveal_round(
    models: Iterable[ListenerModel],
    messages: Iterable[Message],
    true_vocabs: dict[int, Vocabulary] | list[Vocabulary],
) -> None:
    """Teach every listener the true meaning of each symbol used this round."""
    messages = list(messages)
    for model in models:
        for msg in messages:
            if msg.sender == model.listener:
                continue
            vocab = true_vocabs[msg.sender]
            table = model.peer(msg.sender)
            for s in msg.symbols:
                if s not in table:
                    table[s] = vocab.lookup(s)


def dump_vocabulary(vocab: Vocabulary) -> str:
    """Serialize as ``owner<TAB>symbol<TAB>intent<TAB>item<TAB>qty`` lines.

    Reserved markers use the marker name as intent and ``-`` for item/qty.
    """
    lines = []
    for entry in vocab.creation_order:
        symbol = vocab.map[entry]
        if isinstance(entry, Concept):
            lines.append(
                f"{vocab.owner}\t{symbol}\t{entry.intent.name}\t{entry.item}\t{entry.qty}"
            )
        else:
            lines.append(f"{vocab.owner}\t{symbol}\t{entry.name}\t-\t-")
    return "\n".join(lines) + ("\n" if lines else "")


def load_vocabularies(text: str) -> dict[int, Vocabulary]:
    vocabs: dict[int, Vocabulary] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        owner_s, symbol, intent, item, qty = line.split("\t")
        owner = int(owner_s)
        vocab = vocabs.setdefault(owner, Vocabulary(owner))
        if item == "-":
            entry = Marker(intent)
        else:
            entry = Concept(Intent[intent], int(item), int(qty))
        if make_symbol(owner, len(vocab.map)) != symbol:
            raise ValueError(f"out-of-order symbol {symbol!r} for agent {owner}")
        encode(vocab, entry)
    return vocabs
