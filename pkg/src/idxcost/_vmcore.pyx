# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled execution kernel; semantics identical to ``_vmcore_py``."""
from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t, int8_t

from .errors import ArithmeticOverflow, FuelExhausted, ModuloByZero, StuckEvaluation

NAME = "cython"

cdef extern from *:
    bint __builtin_saddll_overflow(long long a, long long b, long long *res) nogil
    bint __builtin_ssubll_overflow(long long a, long long b, long long *res) nogil
    bint __builtin_smulll_overflow(long long a, long long b, long long *res) nogil

# error codes raised out of _eval
cdef enum:
    E_OK = 0
    E_OVERFLOW = 1
    E_MODZERO = 2


cdef int _eval(const int64_t[::1] code, Py_ssize_t pc, int64_t[::1] vals,
               long long *stack, long long *out) nogil:
    cdef Py_ssize_t sp = 0
    cdef long long x, y, r
    cdef int64_t op
    while True:
        op = code[pc]
        if op == 0:
            stack[sp] = code[pc + 1]
            sp += 1
            pc += 2
            continue
        if op == 1:
            stack[sp] = vals[code[pc + 1]]
            sp += 1
            pc += 2
            continue
        if op == 14:
            sp -= 1
            if stack[sp] == 0:
                pc = code[pc + 1]
            else:
                pc += 2
            continue
        if op == 15:
            pc = code[pc + 1]
            continue
        if op == 16:
            out[0] = stack[sp - 1]
            return E_OK
        sp -= 1
        y = stack[sp]
        x = stack[sp - 1]
        if op == 2:
            if __builtin_saddll_overflow(x, y, &r):
                return E_OVERFLOW
        elif op == 3:
            if __builtin_ssubll_overflow(x, y, &r):
                return E_OVERFLOW
        elif op == 4:
            if __builtin_smulll_overflow(x, y, &r):
                return E_OVERFLOW
        elif op == 5:
            if y == 0:
                return E_MODZERO
            if y == -1:
                r = 0
            else:
                r = x % y
                if r != 0 and ((r < 0) != (y < 0)):
                    r += y
        elif op == 6:
            r = x < y
        elif op == 7:
            r = x <= y
        elif op == 8:
            r = x > y
        elif op == 9:
            r = x >= y
        elif op == 10:
            r = x == y
        elif op == 11:
            r = x != y
        elif op == 12:
            r = (x != 0) and (y != 0)
        else:
            r = (x != 0) or (y != 0)
        stack[sp - 1] = r
        pc += 1


cdef _raise(int err):
    if err == E_MODZERO:
        raise ModuloByZero("modulus by zero")
    raise ArithmeticOverflow("arithmetic result outside signed 64-bit range")


def run(const int64_t[::1] ops, const int64_t[::1] arg1, const int64_t[::1] arg2,
        const int64_t[::1] arg3, const int64_t[::1] code,
        const int64_t[::1] lab_start, const int64_t[::1] lab_len,
        const int64_t[::1] lab_a, const int64_t[::1] lab_b,
        Py_ssize_t n_regs, int64_t[::1] values, int8_t[::1] written,
        const int64_t[::1] costs, long long fuel, Py_ssize_t max_stack):
    cdef long long *stack = <long long *> malloc((max_stack + 1) * sizeof(long long))
    cdef long long *regs = <long long *> malloc((n_regs + 1) * sizeof(long long))
    cdef char *defined = <char *> malloc(n_regs + 1)
    cdef long long cost = 0, steps = 0, res, v
    cdef Py_ssize_t pc = 0, j, s, lid, k
    cdef int64_t op, a
    cdef int err
    trace = []
    if stack == NULL or regs == NULL or defined == NULL:
        free(stack); free(regs); free(defined)
        raise MemoryError()
    for j in range(n_regs):
        defined[j] = 0
        regs[j] = 0
    try:
        while True:
            if steps >= fuel:
                raise FuelExhausted(steps)
            op = ops[pc]
            cost += costs[op]
            steps += 1
            if op == 3:
                err = _eval(code, arg2[pc], values, stack, &res)
                if err:
                    _raise(err)
                values[arg1[pc]] = res
                written[arg1[pc]] = 1
                pc += 1
            elif op == 4:
                err = _eval(code, arg1[pc], values, stack, &res)
                if err:
                    _raise(err)
                pc = arg2[pc] if res != 0 else arg3[pc]
            elif op == 5:
                pc = arg1[pc]
            elif op == 0:
                lid = arg1[pc]
                s = lab_start[lid]
                out = []
                for j in range(lab_len[lid]):
                    a = lab_a[s + j]
                    if a == 0:
                        out.append(lab_b[s + j])
                    elif not defined[j]:
                        raise StuckEvaluation(f"label {lid} needs unset index register i{j}")
                    else:
                        if __builtin_smulll_overflow(a, regs[j], &v) or \
                                __builtin_saddll_overflow(v, lab_b[s + j], &v):
                            raise ArithmeticOverflow("index value outside signed 64-bit range")
                        out.append(v)
                trace.append((lid, tuple(out)))
                pc += 1
            elif op == 1:
                k = arg1[pc]
                regs[k] = 0
                defined[k] = 1
                pc += 1
            elif op == 2:
                k = arg1[pc]
                if not defined[k]:
                    raise StuckEvaluation(f"IND_INC on unset register i{k}")
                regs[k] += 1
                pc += 1
            else:
                break
    finally:
        free(stack)
        free(regs)
        free(defined)
    return trace, cost, steps
