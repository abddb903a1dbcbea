# -*- coding: utf-8 -*-
import math

from django.template import Library

from django_flockspc.settings import FLOCKSPC_FAIL_MARKER, FLOCKSPC_PASS_MARKER

register = Library()


@register.filter
def metric(value, verdict=None):
    """ Two-decimal metric followed by its pass/fail marker; "-" when absent. """
    if value is None:
        return '-'
    text = '%.2f' % value
    if verdict is None:
        return text
    return '%s %s' % (text, FLOCKSPC_PASS_MARKER if verdict else FLOCKSPC_FAIL_MARKER)


@register.filter
def radius(value):
    if value is None or math.isinf(value):
        return '∞'
    return '%.2f' % value
