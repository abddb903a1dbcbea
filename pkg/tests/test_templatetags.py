import math
from unittest.mock import patch

from django.template import Context, Template
from django.test import SimpleTestCase

from django_flockspc.templatetags.flockspc import metric, radius

MODULE_PATCH = 'django_flockspc.templatetags.flockspc.{}'


class TestMetricFilter(SimpleTestCase):

    def test_missing_metric(self):
        """
        Test that an undefined metric renders as a dash
        """
        self.assertEqual(metric(None, None), '-')
        self.assertEqual(metric(None, False), '-')

    def test_markers(self):
        """
        Test the pass and fail markers
        """
        self.assertEqual(metric(0.78412, True), '0.78 ✓')
        self.assertEqual(metric(0.14, False), '0.14 ✗')
        self.assertEqual(metric(3.0), '3.00')

    def test_custom_markers(self):
        """
        Test metric markers taken from settings
        """
        with patch(MODULE_PATCH.format('FLOCKSPC_PASS_MARKER'), 'ok'), \
                patch(MODULE_PATCH.format('FLOCKSPC_FAIL_MARKER'), 'FAIL'):
            self.assertEqual(metric(0.5, True), '0.50 ok')
            self.assertEqual(metric(0.5, False), '0.50 FAIL')

    def test_in_template(self):
        """
        Test the filter through the template engine
        """
        template = Template('{% load flockspc %}{{ value|metric:ok }}')
        self.assertEqual(template.render(Context({'value': 1.234, 'ok': True})), '1.23 ✓')


class TestRadiusFilter(SimpleTestCase):

    def test_unlimited(self):
        """
        Test that an unlimited neighbourhood renders as infinity
        """
        self.assertEqual(radius(math.inf), '∞')
        self.assertEqual(radius(None), '∞')

    def test_finite(self):
        """
        Test a finite neighbourhood radius
        """
        self.assertEqual(radius(0.9), '0.90')
