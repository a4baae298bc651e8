"""Tracing shim: run a Python program and record caller/callee frame pairs.

Usage: python3 shim.py RECORDS.jsonl PROGRAM.py [args...]

Records one JSON object per unique call edge observed through the
interpreter's profiling hook.  Each side carries the code object's file,
function name, first line, and the defining class when the call is a bound
method (resolved by walking the receiver's MRO for the class whose
dictionary holds this code object, which matches static member lookup).
"""

import json
import runpy
import sys


CO_OPTIMIZED = 0x0001


def _frame_kind(code):
    if code.co_name == "<module>":
        return "module"
    if code.co_flags & CO_OPTIMIZED:
        return "function"
    return "class"  # class bodies execute in their own unoptimized frame


def _describe(frame):
    code = frame.f_code
    cls = None
    if code.co_argcount >= 1:
        first = code.co_varnames[0]
        receiver = frame.f_locals.get(first)
        if receiver is not None and first in ("self", "cls"):
            rtype = receiver if isinstance(receiver, type) else type(receiver)
            cls = _defining_class(rtype, code)
    return {
        "file": code.co_filename,
        "name": code.co_name,
        "line": code.co_firstlineno,
        "cls": cls,
        "kind": _frame_kind(code),
    }


def _defining_class(rtype, code):
    try:
        for klass in type.mro(rtype):
            member = klass.__dict__.get(code.co_name)
            func = getattr(member, "__func__", member)
            if getattr(func, "__code__", None) is code:
                return klass.__qualname__
    except Exception:
        pass
    return getattr(rtype, "__qualname__", None)


def main():
    records_path, program = sys.argv[1], sys.argv[2]
    sys.argv = [program] + sys.argv[3:]
    program_dir = program.rsplit("/", 1)[0] if "/" in program else "."
    sys.path.insert(0, program_dir)

    seen = set()
    records = []
    shim_file = __file__

    def profiler(frame, event, arg):
        if event != "call":
            return
        if frame.f_lasti >= 0:
            return  # generator/coroutine resumption, not a new call
        parent = frame.f_back
        if parent is None:
            return
        if frame.f_code.co_filename == shim_file or parent.f_code.co_filename == shim_file:
            return
        key = (id(frame.f_code), id(parent.f_code),
               frame.f_code.co_name, parent.f_code.co_name)
        callee = _describe(frame)
        caller = _describe(parent)
        dedup = (
            caller["file"], caller["name"], caller["cls"],
            callee["file"], callee["name"], callee["cls"],
        )
        if dedup in seen:
            return
        seen.add(dedup)
        records.append({"caller": caller, "callee": callee})

    status = 0
    sys.setprofile(profiler)
    try:
        runpy.run_path(program, run_name="__main__")
    except SystemExit as exc:
        code = exc.code
        status = code if isinstance(code, int) else (0 if code is None else 1)
    except BaseException as exc:  # partial trace is still useful
        status = 1
        print(f"trace-shim: program raised {type(exc).__name__}: {exc}", file=sys.stderr)
    finally:
        sys.setprofile(None)
        with open(records_path, "w", encoding="utf-8") as handle:
            for record in records:
                handle.write(json.dumps(record, sort_keys=True) + "\n")
    sys.exit(status)


if __name__ == "__main__":
    main()
