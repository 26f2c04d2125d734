'''The built-in rule set loaded ahead of every user program.

It defines the document traversal entry points, the navigation and
transformation operators (``/ ^ @ ? id # c atts sort sortbyName child
descendant copy copy_of level last count name distinct``), tree editing
(``removeElement``, ``remove``, ``removeAttribute``, ``insertBefore``,
``insertAfter``), serializability checks, and general helpers
(``quicksort/3``, ``nth/3``, ``church/2``, ``concat``, ``equals/2``, ...).

This module also provides Python-side utilities that complement the rule
set: structural tree equality modulo attribute order, and conversion of a
flat attribute-only document into a list of facts (one relation row per
child element).
'''

from __future__ import annotations

import re
from typing import Optional

from .logic_engine import Clause, Program
from .rule_language import OperatorTable, parse_program
from .term_core import (
    Atom,
    Compound,
    Term,
    deref,
    list_items,
    split_attr,
)

__all__ = [
    "PRELUDE_SRC",
    "prelude_program",
    "prelude_operators",
    "load_prelude",
    "trees_equal",
    "tree_to_relation",
]


PRELUDE_SRC = """\
% Document traversal.

traverse(pi(_),[]):-!.
traverse(comment(_),[]):-!.
traverse(X,Res):-template(X,Res), !.
traverse(element(_,_,L),Res):-
  traverseElements(L,Res).
traverse(text(_),[]).

traverseElements([],[]).
traverseElements([H|T],Res):-
  not(list(H)), compound(H),
  traverse(H,Res1),
  traverseElements(T,Res2),
  append(Res1,Res2,Res).
traverseElements([H|T],Res):-
  (list(H);not(compound(H))),
  traverseElements(T,Res).

template(never,never):-fail.

% Navigation and transformation operators.

:-op(100,yfx,'/').
transform(E1 / Child,element(Child,A,C)):-
  E1=element(Name,AttList,Children),
  append(_,[(element(Child,A,C))|_],
         Children).
transform(X / Child,Y):-transform(X,X2),
  transform(X2 / Child,Y).

:-op(100,yfx,'^').
transform(_ ^ Name,_):-
  (var(Name);list(Name)), !, fail.
transform(element(Name,A,C) ^ Name,
          element(Name,A,C)).
transform(element(_,_,C) ^ Name,X):-
  member(H,C),
  transform(H ^ Name,X).
transform(X ^ Name,Y):-
  transform(X,X2),
  transform(X2 ^ Name,Y).

:-op(100,yfx,'@').
transform(element(_,AttList,_) @ Att,X):-
  append(_,[A|_],AttList),
  atom_codes(Att,AttCodes),
  atom_codes(A,ACodes),
  append(Pre,[61,34|X2],ACodes),
  append(X3,[34],X2),
  Pre=AttCodes, !, atom_codes(X,X3).
transform(X @ Att, Y):-
  transform(X,X2),
  transform(X2 @ Att, Y).

:-op(100,fy,atts).
transform(atts element(_,L,_),_):-
  not(list(L)), !, fail.
transform(atts element(_,L,_),_):-
  findall(X,selectattribute(X,L),[]),
  !, fail.
transform(atts element(_,L,_),Y):-
  findall(X,selectattribute(X,L),Y).
transform(atts E,Y):-
  transform(E,E2),
  transform(atts E2,Y).

:-op(100,yfx,'?').
transform(X ? Att1):-
  atom(Att1), transform(atts X,X2),
  member(Att1,X2).

:-op(100,yfx,id).
transform(X id S,Attrib):-
  X=element(_,_,_),
  transform(atts X,AttribNames),
  member(Attrib,AttribNames),
  transform(X @ Attrib,S).
transform(X id S,Id):-
  transform(X,X2),
  transform(X2 id S,Id).

:-op(100,yfx,'#').
transform(element(_,_,L) # N,Y):-
  integer(N), N>=1,
  findall(X,member(text(X),L),Z),
  nth(N,Z,Y).
transform(X # N,Y):-
  transform(X,X2), transform(X2 # N,Y).

transform(element(_,_,L) ? N,Y):-
  integer(N), N>=1,
  findall(X,member(pi(X),L),Z),
  nth(N,Z,Y).
transform(X ? N,Y):-
  transform(X,X2),
  transform(X2 ? N,Y).

:-op(100,yfx,'c').
transform(element(_,_,L) c N,Y):-
  integer(N), N>=1,
  findall(X,member(comment(X),L),Z),
  nth(N,Z,Y).
transform(X c N,Y):-
  transform(X,X2),
  transform(X2 c N,Y).

:-op(100,yfx,sort).
transform(element(N,A,L)
          sort AttName,
          element(N,A,Y)):-
  extendStructure(L2,AttName,L),
  quicksort(L2,leAttributes,L3),
  extendStructure(L3,AttName,Y).

:-op(100,fy,sortbyName).
transform(sortbyName element(N,A,L),
          element(N,A,Y)):-
  quicksort(L,le,Y).

:-op(100,fy,child).
transform(child element(_,_,C),Y):-
  member(Y,C).
transform(child X,Y):-
  transform(X,X2),
  transform(child X2,Y).

:-op(100,fy,descendant).
transform(descendant X,Y):-
  transform(child X,Y).
transform(descendant X,Y):-
  transform(child X,Y2),
  transform(descendant Y2,Y).

:-op(100,fy,copy).
transform(copy element(N,_,_),
          element(N,[],[])).
transform(copy text(T),text(T)).
transform(copy comment(C),
          comment(C)).
transform(copy pi(P),pi(P)).
transform(copy X,Y):-
  transform(X,X2),
  transform(copy X2,Y).

:-op(100,fy,copy_of).
transform(copy_of X,X):-
  X=element(_,_,_);
  X=text(_);
  X=comment(_); X=pi(_).
transform(copy_of X,Y):-transform(X,Y).

:-op(100,yfx,level).
transform(Tree level Node,Y):-
  level1(Tree,Node,Y).
transform(Tree level Node,Y):-
  transform(Tree,Tree2),
  transform(Node,Node2),
  level1(Tree2,Node2,Y).

:-op(100,fy,last).
transform(last element(_,_,C),Y):-
  last(C,Y).
transform(last X,Y):-
  transform(X,X2),
  transform(last X2,Y).

:-op(100,fy,count).
transform(count element(_,_,C),Len):-
  length(C,Len).
transform(count X,Y):-
  transform(X,X2),
  transform(count X2,Y).

:-op(100,fy,name).
transform(name element(Name,_,_),_):-
  (var(Name);list(Name)), !, fail.
transform(name element(Name,_,_),Name).
transform(name X,Y):-
  transform(X,X2),
  transform(name X2,Y).

:-op(100,fy,distinct).
transform(distinct element(N,A,L),
          element(N,A,Z)):-
  reverse(L,L2),
  removeDuplicates(L2,L3),
  reverse(L3,Z).

% Tree editing.

removeElement(element(N,As,L),
              Name,element(N,As,L2)):-
  delete(element(Name,_,_),L,L2).

remove(element(N,As,L),Node,
       element(N,As,L2)):-
  delete(Node,L,L2).

removeAttribute(E,Att,element(N,As2,L)):-
  E=element(N,As,L),
  transform(E @ Att,Val),
  atom_codes(Att,AttCodes),
  atom_codes(Val,ValCodes),
  append(AttCodes,[61,34|ValCodes],Res2),
  append(Res2,[34],Res),
  atom_codes(Selected,Res),
  append(Pre,[Selected|Post],As),
  !,
  append(Pre,Post,As2).

insertBefore(_,_,RecentNode,_):-
  (var(RecentNode);
   list(RecentNode)),
  !, fail.
insertBefore(_,NewNode,_,_):-
  (var(NewNode);
   list(NewNode)),
  !, fail.
insertBefore(E1,NewNode,RecentNode,
             element(N,A,List2)):-
  E1=element(N,A,List),
  compound(RecentNode),
  !,
  append(Pre,[RecentNode|Post],List),
  append(Pre,[NewNode,RecentNode|Post],
         List2).
insertBefore(E1,NewNode,Position,
             element(N,A,List2)):-
  E1=element(N,A,List),
  integer(Position),
  !, Position>=1,
  nth(Position,List,X),
  append(Pre,[X|Post],List),
  append(Pre,[NewNode,X|Post],List2).

insertAfter(_,_,RecentNode,_):-
  (var(RecentNode); list(RecentNode)),
  !, fail.
insertAfter(_,NewNode,_,_):-
  (var(NewNode); list(NewNode)),
  !, fail.
insertAfter(E1,NewNode,RecentNode,
    element(N,A,List2)):-
  E1=element(N,A,List),
  compound(RecentNode), !,
  append(Pre,[RecentNode|Post],List),
  append(Pre,[RecentNode,NewNode|Post],
         List2).
insertAfter(E1,NewNode,Position,
            element(N,A,List2)):-
  E1=element(N,A,List), integer(Position),
  !,
  Position>=1, nth(Position,List,X),
  append(Pre,[X|Post],List),
  append(Pre,[X,NewNode|Post],List2).

% Protected helpers.

level1(Tree,Node,Result):-
  level0(Tree,Node,[],Result).

level0(element(_,_,Children),Y,Res0,Res):-
  nth(N,Children,Y), Res=[N|Res0].
level0(element(_,_,[H|T]),Y,Res0,Res):-
  level0(H,Y,Res0,Res1),
  Res=[1|Res1];
  levels0([H|T],T,Y,Res0,Res).

levels0(L,[H|T],Y,Res0,Res):-
  level0(H,Y,Res0,Res1),
  nth(N,L,H), Res=[N|Res1];
  levels0(L,T,Y,Res0,Res).

nth0(s(zero),[X|_],X).
nth0(s(M),[_|L],X):-nth0(M,L,X).

selectattribute(_,L):-
  (var(L);number(L);
   atom(L), not(list(L))),
  !, fail.
selectattribute(X,List):-
  member(Y,List),
  atom_codes(Y,YCodes2),
  append(X2,[61,34|YCodes],YCodes2),
  append(_,[34],YCodes), atom_codes(X,X2).

removeDuplicates(L1,_):-not(list(L1)),
  !, fail.
removeDuplicates([],[]).
removeDuplicates([H|T],T2):-
  member(H,T),
  removeDuplicates(T,T2).
removeDuplicates([H|T],[H|T2]):-
  not(member(H,T)),
  removeDuplicates(T,T2).

lexicalle([],[]).
lexicalle([],[_|_]).
lexicalle([_|_],[]):-fail.
lexicalle([H|_],[H2|_]):-
  nonvar(H), nonvar(H2), H>H2, fail.
lexicalle([H|T],[H2|T2]):-
  nonvar(H), nonvar(H2), H=H2,
  lexicalle(T,T2), !.
lexicalle([H|_],[H2|_]):-
  var(H), var(H2), !, fail.
lexicalle([H|_],[H2|_]):-
  nonvar(H), nonvar(H2), H<H2, !.
lexicalle([H|T],[H2|T2]):-
  H=H2, lexicalle(T,T2), !.

le(element(N,_,_),element(N2,_,_)):-
  atom(N), not(list(N)),
  atom(N2), not(list(N2)),
  atom_codes(N,NCodes),
  atom_codes(N2,N2Codes),
  lexicalle(NCodes,N2Codes).

ge(X,Y):-le(Y,X).

concat0([],X,X).
concat0([H|T],X,Y):-list(H),
  append(X,H,X2), concat0(T,X2,Y).

extendStructure([],_,[]).
extendStructure(L,_,L2):-
  not(ground(L)),
  not(ground(L2)), !, fail.
extendStructure([E1|T2],Extension,[E2|T]):-
  E1=element(N,A,C,Extension),
  extendStructure(T2,Extension,T),
  E2=element(N,A,C).

checkSerializable(pi(_)):-!.
checkSerializable(comment(_)):-!.
checkSerializable(text(_)):-!.
checkSerializable(element(N,A,C)):-
  not(list(N)), atom(N),
  checkAttributes(A),
  checkSerializables(C), !.
checkSerializable(X):-
  write('Error: '), write(X),
  write(' was not expected here!'), fail.

checkSerializables([]).
checkSerializables([H|T]):-
  checkSerializable(H),
  checkSerializables(T).

checkAttributes([]):-!.
checkAttributes([H|T]):-
  atom_codes(H,HCodes),
  append(_,[61,34|HCodes1],HCodes),
  append(_,[34],HCodes1),
  checkAttributes(T), !.
checkAttributes(X):-
  write('Error in remaining attributes list: '),
  write(X), fail.

% General helpers.

sum([],0).
sum([H|T],X):-sum(T,X2), X is X2+H.

last([_|T],L):-last(T,L).
last([H],H).

nth(N,L,E):-
  var(N), nth0(N1,L,E), church(N1,N).
nth(N,L,E):-
  church(N1,N), nth0(N1,L,E).

concat(L,X):-concat0(L,[],X).

church(zero,0):-!.
church(s(X),N):-
  var(N),
  church(X,N1),
  N is N1+1.
church(s(X),N):-
  not(var(N)),
  N1 is N-1,
  church(X,N1).

leAttributes(element(_,AL1,_,Att1),
             element(_,AL2,_,Att1)):-
  transform(element(_,AL1,_) @ Att1,A1),
  transform(element(_,AL2,_) @ Att1,A2),
  atom_codes(A1,E1Codes),
  atom_codes(A2,E2Codes),
  lexicalle(E1Codes,E2Codes).

leStrings(S1,S2):-
  atom(S1),
  not(list(S1)),
  atom(S2),
  not(list(S2)),
  atom_codes(S1,S1Codes),
  atom_codes(S2,S2Codes),
  lexicalle(S1Codes,S2Codes).

checkSerializable0(element(N,A,C)):-
  checkSerializable(element(N,A,C)), !.
checkSerializable0(X):-
  write('Error: element()-constructor was expected, but '),
  write(X),
  write(' was found!'),
  fail.

concat(E1,E2,A1):-var(A1),
  A1 is cat(E1,E2).
concat(E1,E2,A1):-var(E1),
  atom_codes(E2,E2Codes),
  atom_codes(A1,A1Codes),
  append(E1Codes,E2Codes,A1Codes),
  atom_codes(E1,E1Codes).
concat(E1,E2,A1):-var(E2),
  atom_codes(E1,E1Codes),
  atom_codes(A1,A1Codes),
  append(E1Codes,E2Codes,A1Codes),
  atom_codes(E2,E2Codes).

printTree(text(T),T):-
  !, atom(T), not(list(T)).
printTree(comment(_),'').
printTree(pi(_),'').
printTree(element(_,_,Children),Res):-
  printChildren(Children,Res), !.

printChildren([],'').
printChildren([H|T],Res):-
  printTree(H,Res1),
  printChildren(T,Res2),
  Res is cat(Res1,Res2).

flatten(X,_):-
  (var(X);list(X);number(X)),
  !, fail.
flatten(element(N,A,L),
        [element(N,A,[])|T2]):-
  !, flattenList(L,T2).
flatten(X,[X]):-
  X=text(_);X=pi(_);X=comment(_).

flattenList([],[]).
flattenList([H|T],L):-
  flatten(H,L1),
  !, flattenList(T,L2), append(L1,L2,L).

nodes(X,_):-
  (var(X);list(X);number(X)),
  !, fail.
nodes(element(N,A,L),
      [element(N,A,L)|T2]):-
  !, nodesList(L,T2), !.
nodes(X,[X]):-
  X=text(_);
  X=pi(_);
  X=comment(_).

nodesList([],[]).
nodesList([H|T],L):-
  nodes(H,L1),
  nodesList(T,L2),
  append(L1,L2,L).

% Sorting and structural equality.

quicksort([],_,[]).
quicksort([H|T],P,S):-
  split0(T,H,P,Lo,Hi),
  quicksort(Lo,P,SLo),
  quicksort(Hi,P,SHi),
  append(SLo,[H|SHi],S).

split0([],_,_,[],[]).
split0([X|Xs],Pivot,P,[X|Lo],Hi):-
  call(P,X,Pivot), !,
  split0(Xs,Pivot,P,Lo,Hi).
split0([X|Xs],Pivot,P,Lo,[X|Hi]):-
  split0(Xs,Pivot,P,Lo,Hi).

position(Tree,Child,Pos):-
  Tree=element(_,_,C),
  nth(Pos,C,Child).

equals(X,X):-
  X=text(_);X=comment(_);X=pi(_).
equals(element(N,A1,C1),element(N,A2,C2)):-
  canon(A1,CA),
  canon(A2,CA),
  equalsList(C1,C2).

equalsList([],[]).
equalsList([H1|T1],[H2|T2]):-
  equals(H1,H2),
  equalsList(T1,T2).
"""


_CACHE: dict[str, Program] = {}


def prelude_program() -> Program:
    """A fresh copy of the parsed built-in rule set."""
    if "prelude" not in _CACHE:
        _CACHE["prelude"] = parse_program(PRELUDE_SRC)
    return _CACHE["prelude"].copy()


def prelude_operators() -> OperatorTable:
    """The operator table after loading the built-in rule set."""
    return prelude_program().operators.copy()


def load_prelude(user: Optional[Program] = None) -> Program:
    """The built-in rules with *user* clauses appended after them."""
    combined = prelude_program()
    if user is not None:
        combined.extend(user)
        if user.operators is not None:
            combined.operators = user.operators
    return combined


# ---------------------------------------------------------------------------
# Python-side helpers


def trees_equal(a: Term, b: Term) -> bool:
    """Structural node equality that ignores attribute order."""
    a = deref(a)
    b = deref(b)
    if isinstance(a, Compound) and isinstance(b, Compound):
        if a.name != b.name or len(a.args) != len(b.args):
            return False
        if a.name == "element" and len(a.args) == 3:
            name_a, attrs_a, children_a = (deref(x) for x in a.args)
            name_b, attrs_b, children_b = (deref(x) for x in b.args)
            if name_a != name_b:
                return False
            items_a = list_items(attrs_a)
            items_b = list_items(attrs_b)
            if items_a is None or items_b is None:
                return items_a == items_b and trees_equal(children_a, children_b)
            key = lambda t: getattr(deref(t), "name", "")
            if [key(x) for x in sorted(items_a, key=key)] != [
                key(x) for x in sorted(items_b, key=key)
            ]:
                return False
            kids_a = list_items(children_a)
            kids_b = list_items(children_b)
            if kids_a is None or kids_b is None or len(kids_a) != len(kids_b):
                return False
            return all(trees_equal(x, y) for x, y in zip(kids_a, kids_b))
        return all(trees_equal(x, y) for x, y in zip(a.args, b.args))
    return a == b


_INT_VALUE = re.compile(r"-?[0-9]+\Z")


def tree_to_relation(doc: Term) -> list[Clause]:
    """Convert a flat attribute-only document into relation facts.

    Every child element of the root becomes one fact: the child's element
    name is the relation name and its attribute values, taken in sorted
    attribute-name order, are the arguments.  Integer-looking values become
    integers, everything else an atom.  All children sharing a relation name
    must carry the same attribute-name set; element grandchildren are
    rejected.
    """
    root = deref(doc)
    if not (isinstance(root, Compound) and root.name == "element" and len(root.args) == 3):
        raise ValueError("the document root must be an element")
    children = list_items(deref(root.args[2])) or []
    schemas: dict[str, list[str]] = {}
    facts: list[Clause] = []
    for index, child in enumerate(children):
        child = deref(child)
        if not (isinstance(child, Compound) and child.name == "element" and len(child.args) == 3):
            continue
        name = deref(child.args[0])
        assert isinstance(name, Atom)
        grandchildren = list_items(deref(child.args[2])) or []
        for grandchild in grandchildren:
            grandchild = deref(grandchild)
            if isinstance(grandchild, Compound) and grandchild.name == "element":
                raise ValueError(
                    "child %d has nested elements and cannot become a relation row" % index
                )
        attrs = list_items(deref(child.args[1])) or []
        values: dict[str, str] = {}
        for attr in attrs:
            attr = deref(attr)
            parts = split_attr(attr) if isinstance(attr, Atom) else None
            if parts is None:
                raise ValueError("child %d has a malformed attribute" % index)
            values[parts[0]] = parts[1]
        ids = sorted(values)
        known = schemas.setdefault(name.name, ids)
        if known != ids:
            raise ValueError(
                "child %d of relation %r has attributes %s, expected %s"
                % (index, name.name, ids, known)
            )
        args = tuple(
            int(values[i]) if _INT_VALUE.match(values[i]) else Atom(values[i]) for i in ids
        )
        head: Term = Compound(name.name, args) if args else Atom(name.name)
        facts.append(Clause(head))
    return facts
