"""Pure-Python execution kernel; mirrors ``_vmcore.pyx`` instruction for instruction."""
from .errors import ArithmeticOverflow, FuelExhausted, ModuloByZero, StuckEvaluation

_MIN = -(2**63)
_MAX = 2**63 - 1

NAME = "python"


def _eval(code, pc, vals):
    stack = []
    push = stack.append
    pop = stack.pop
    while True:
        op = code[pc]
        if op == 0:
            push(code[pc + 1])
            pc += 2
            continue
        if op == 1:
            push(vals[code[pc + 1]])
            pc += 2
            continue
        if op == 14:
            pc = code[pc + 1] if pop() == 0 else pc + 2
            continue
        if op == 15:
            pc = code[pc + 1]
            continue
        if op == 16:
            return stack[-1]
        y = pop()
        x = pop()
        if op == 2:
            r = x + y
        elif op == 3:
            r = x - y
        elif op == 4:
            r = x * y
        elif op == 5:
            if y == 0:
                raise ModuloByZero("modulus by zero")
            r = x % y
        elif op == 6:
            r = 1 if x < y else 0
        elif op == 7:
            r = 1 if x <= y else 0
        elif op == 8:
            r = 1 if x > y else 0
        elif op == 9:
            r = 1 if x >= y else 0
        elif op == 10:
            r = 1 if x == y else 0
        elif op == 11:
            r = 1 if x != y else 0
        elif op == 12:
            r = 1 if (x != 0 and y != 0) else 0
        else:
            r = 1 if (x != 0 or y != 0) else 0
        if r < _MIN or r > _MAX:
            raise ArithmeticOverflow(f"value {r} outside signed 64-bit range")
        push(r)
        pc += 1


def run(ops, arg1, arg2, arg3, code, lab_start, lab_len, lab_a, lab_b,
        n_regs, values, written, costs, fuel, max_stack):
    """Execute an encoded program; ``values``/``written`` are updated in place.

    Returns ``(trace, cost, steps)`` where trace items are
    ``(label_id, tuple_of_index_values)``.
    """
    ops = ops.tolist()
    arg1 = arg1.tolist()
    arg2 = arg2.tolist()
    arg3 = arg3.tolist()
    code = code.tolist()
    lab_start = lab_start.tolist()
    lab_len = lab_len.tolist()
    lab_a = lab_a.tolist()
    lab_b = lab_b.tolist()
    costs = costs.tolist()
    vals = values.tolist()
    wr = written.tolist()
    regs = [0] * n_regs
    defined = [False] * n_regs
    trace = []
    cost = 0
    steps = 0
    pc = 0
    while True:
        if steps >= fuel:
            raise FuelExhausted(steps)
        op = ops[pc]
        cost += costs[op]
        steps += 1
        if op == 3:
            slot = arg1[pc]
            vals[slot] = _eval(code, arg2[pc], vals)
            wr[slot] = 1
            pc += 1
        elif op == 4:
            pc = arg2[pc] if _eval(code, arg1[pc], vals) != 0 else arg3[pc]
        elif op == 5:
            pc = arg1[pc]
        elif op == 0:
            lid = arg1[pc]
            s = lab_start[lid]
            out = []
            for j in range(lab_len[lid]):
                a = lab_a[s + j]
                b = lab_b[s + j]
                if a == 0:
                    out.append(b)
                elif not defined[j]:
                    raise StuckEvaluation(f"label {lid} needs unset index register i{j}")
                else:
                    v = a * regs[j] + b
                    if v > _MAX:
                        raise ArithmeticOverflow(f"index value {v} outside signed 64-bit range")
                    out.append(v)
            trace.append((lid, tuple(out)))
            pc += 1
        elif op == 1:
            k = arg1[pc]
            regs[k] = 0
            defined[k] = True
            pc += 1
        elif op == 2:
            k = arg1[pc]
            if not defined[k]:
                raise StuckEvaluation(f"IND_INC on unset register i{k}")
            regs[k] += 1
            pc += 1
        else:
            break
    values[:] = vals
    written[:] = wr
    return trace, cost, steps
