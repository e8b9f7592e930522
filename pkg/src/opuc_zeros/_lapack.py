"""Eigenvalues of upper Hessenberg matrices through LAPACK ``dlahqr``.

``numpy.linalg.eigvals`` reduces to Hessenberg form and then runs the
multishift QR of ``dhseqr``, which for matrices of order 75 and up is slower
than the plain double-shift ``dlahqr`` on the sizes used for Monte Carlo
(n <= 256).  scipy exports ``dlahqr`` only as a Cython function pointer, so it
is called through ctypes; any problem falls back to numpy.
"""

from __future__ import annotations

import ctypes
import threading

import numpy as np

_lock = threading.Lock()
_state = {"fn": None, "checked": False}


def _load():
    from scipy.linalg import cython_lapack

    api = ctypes.pythonapi
    api.PyCapsule_GetName.restype = ctypes.c_char_p
    api.PyCapsule_GetName.argtypes = [ctypes.py_object]
    api.PyCapsule_GetPointer.restype = ctypes.c_void_p
    api.PyCapsule_GetPointer.argtypes = [ctypes.py_object, ctypes.c_char_p]
    cap = cython_lapack.__pyx_capi__["dlahqr"]
    ptr = api.PyCapsule_GetPointer(cap, api.PyCapsule_GetName(cap))
    ip = ctypes.POINTER(ctypes.c_int)
    dp = ctypes.POINTER(ctypes.c_double)
    proto = ctypes.CFUNCTYPE(None, ip, ip, ip, ip, ip, dp, ip, dp, dp, ip, ip, dp, ip, ip)
    return proto(ptr)


def _call(fn, H):
    n = H.shape[0]
    work = np.array(H, dtype=float, order="F")
    wr = np.empty(n)
    wi = np.empty(n)
    z = np.empty(1)
    no, size, one, info = ctypes.c_int(0), ctypes.c_int(n), ctypes.c_int(1), ctypes.c_int(0)
    ref = ctypes.byref
    dp = ctypes.POINTER(ctypes.c_double)
    fn(ref(no), ref(no), ref(size), ref(one), ref(size), work.ctypes.data_as(dp), ref(size),
       wr.ctypes.data_as(dp), wi.ctypes.data_as(dp), ref(one), ref(size), z.ctypes.data_as(dp),
       ref(one), ref(info))
    return wr + 1j * wi, info.value


def _fast():
    with _lock:
        if not _state["checked"]:
            _state["checked"] = True
            try:
                fn = _load()
                # x^3 - 2x^2 - x + 2 = (x-2)(x-1)(x+1) plus a complex pair check
                test = np.array([[0.0, 0.0, -2.0], [1.0, 0.0, 1.0], [0.0, 1.0, 2.0]])
                eig, info = _call(fn, test)
                ok = info == 0 and np.allclose(np.sort(eig.real), [-1.0, 1.0, 2.0])
                eig, info = _call(fn, np.array([[0.0, -1.0], [1.0, 0.0]]))
                ok = ok and info == 0 and np.allclose(np.sort(eig.imag), [-1.0, 1.0])
                _state["fn"] = fn if ok else None
            except (AttributeError, KeyError, OSError, TypeError, ImportError):
                _state["fn"] = None
        return _state["fn"]


def hessenberg_eigvals(H) -> np.ndarray:
    """Eigenvalues of one upper Hessenberg matrix (no balancing)."""
    H = np.asarray(H, dtype=float)
    fn = _fast()
    if fn is not None and H.shape[0] > 0:
        eig, info = _call(fn, H)
        if info == 0:
            return eig
    return np.linalg.eigvals(H)
